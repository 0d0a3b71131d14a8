#include "fdpg/strategy.hpp"

#include <json.hpp>
#include <sstream>
#include <stdexcept>

namespace fdpg {

// ============================================================================
// Builders
// ============================================================================

StrategyPtr one(std::string rule) { return std::make_shared<const StrategyExpr>(StrategyExpr{strat::One{std::move(rule)}}); }
StrategyPtr match(std::string rule) {
  return std::make_shared<const StrategyExpr>(StrategyExpr{strat::Probe{std::move(rule)}});
}
StrategyPtr repeat(StrategyPtr body) { return std::make_shared<const StrategyExpr>(StrategyExpr{strat::Repeat{std::move(body)}}); }
StrategyPtr while_do(StrategyPtr guard, StrategyPtr body) {
  if (!guard || !std::holds_alternative<strat::Probe>(guard->node))
    throw std::invalid_argument("while guards must be match(...) probes");
  return std::make_shared<const StrategyExpr>(StrategyExpr{strat::WhileDo{std::move(guard), std::move(body)}});
}
StrategyPtr seq(std::vector<StrategyPtr> steps) { return std::make_shared<const StrategyExpr>(StrategyExpr{strat::Seq{std::move(steps)}}); }

bool equal(const StrategyExpr& a, const StrategyExpr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, strat::One> || std::is_same_v<T, strat::Probe>) {
          return x.rule == y.rule;
        } else if constexpr (std::is_same_v<T, strat::Repeat>) {
          return equal(*x.body, *y.body);
        } else if constexpr (std::is_same_v<T, strat::WhileDo>) {
          return equal(*x.guard, *y.guard) && equal(*x.body, *y.body);
        } else {
          if (x.steps.size() != y.steps.size()) return false;
          for (std::size_t i = 0; i < x.steps.size(); ++i)
            if (!equal(*x.steps[i], *y.steps[i])) return false;
          return true;
        }
      },
      a.node);
}

std::string to_string(const StrategyExpr& s) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, strat::One>) {
          return "one(" + x.rule + ")";
        } else if constexpr (std::is_same_v<T, strat::Probe>) {
          return "match(" + x.rule + ")";
        } else if constexpr (std::is_same_v<T, strat::Repeat>) {
          return "repeat(" + to_string(*x.body) + ")";
        } else if constexpr (std::is_same_v<T, strat::WhileDo>) {
          return "while(" + to_string(*x.guard) + ")do(" + to_string(*x.body) + ")";
        } else {
          std::string out;
          for (const auto& st : x.steps) out += (out.empty() ? "" : ";") + to_string(*st);
          return out;
        }
      },
      s.node);
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Success: return "success";
    case Outcome::Fail: return "fail";
    case Outcome::Aborted: return "aborted";
  }
  return "?";
}

// ============================================================================
// Derivation trees
// ============================================================================

std::vector<std::size_t> DerivationTree::children(std::size_t id) const {
  std::vector<std::size_t> out;
  for (const auto& n : nodes)
    if (n.parent == id) out.push_back(n.id);
  return out;
}

bool derivation_linear(const DerivationTree& t) {
  std::map<std::size_t, std::size_t> fanout;
  for (const auto& n : t.nodes)
    if (n.parent && ++fanout[*n.parent] > 1) return false;
  return true;
}

namespace {
std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}
}  // namespace

std::string export_derivation(const DerivationTree& t, ExportFormat f) {
  if (f == ExportFormat::Json) {
    nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
    for (const auto& n : t.nodes) {
      nlohmann::ordered_json j;
      j["id"] = n.id;
      j["parent"] = n.parent ? nlohmann::ordered_json(*n.parent) : nlohmann::ordered_json(nullptr);
      j["rule"] = n.rule;
      j["morphism"] = n.morphism;
      j["created"] = n.created;
      j["deleted"] = n.deleted;
      j["hash"] = n.hash;
      nodes.push_back(std::move(j));
    }
    nlohmann::ordered_json doc;
    doc["derivation"] = std::move(nodes);
    return doc.dump(2) + "\n";
  }
  std::ostringstream os;
  os << "digraph derivation {\n  node [shape=box];\n";
  for (const auto& n : t.nodes)
    os << "  d" << n.id << " [label=\"step " << n.id << ": " << dot_escape(n.parent ? n.rule : "G0") << "\"];\n";
  for (const auto& n : t.nodes)
    if (n.parent) os << "  d" << *n.parent << " -> d" << n.id << ";\n";
  os << "}\n";
  return os.str();
}

std::string export_derivation(const DerivationTree& t, const std::string& format) {
  if (format == "dot") return export_derivation(t, ExportFormat::Dot);
  if (format == "json") return export_derivation(t, ExportFormat::Json);
  throw std::invalid_argument("unknown derivation export format '" + format + "'");
}

DerivationTree import_derivation_json(const std::string& text) {
  auto doc = nlohmann::json::parse(text);
  DerivationTree t;
  for (const auto& j : doc.at("derivation")) {
    DerivationNode n;
    n.id = j.at("id").get<std::size_t>();
    if (!j.at("parent").is_null()) n.parent = j.at("parent").get<std::size_t>();
    n.rule = j.at("rule").get<std::string>();
    n.morphism = j.at("morphism").get<std::string>();
    n.created = j.at("created").get<std::size_t>();
    n.deleted = j.at("deleted").get<std::size_t>();
    n.hash = j.at("hash").get<std::uint64_t>();
    t.nodes.push_back(std::move(n));
  }
  return t;
}

// ============================================================================
// Interpreter
// ============================================================================

namespace {

class Interpreter {
 public:
  Interpreter(const PortGraph& g0, const RuleSet& rules, const ExecConfig& cfg,
              const std::function<void(const StepEvent&)>& observer)
      : rules_(rules), cfg_(cfg), observer_(observer), rng_(cfg.seed) {
    if (cfg.max_steps == 0) throw std::invalid_argument("max_steps must be positive");
    result_.graph = g0;
    record_node("", "", 0, 0);
  }

  ExecResult run(const StrategyExpr& s) {
    Outcome o = exec(s);
    result_.outcome = o;
    return std::move(result_);
  }

 private:
  struct Abort {};

  const Rule& rule(const std::string& name) const {
    auto it = rules_.find(name);
    if (it == rules_.end()) throw std::invalid_argument("strategy names unknown rule '" + name + "'");
    return it->second;
  }

  void record_node(const std::string& rule, const std::string& morphism, std::size_t created, std::size_t deleted) {
    DerivationNode n;
    n.id = result_.tree.nodes.size();
    if (n.id > 0) n.parent = current_;
    n.rule = rule;
    n.morphism = morphism;
    n.created = created;
    n.deleted = deleted;
    n.hash = result_.graph.structural_hash();
    if (cfg_.snapshot_mode == SnapshotMode::Full) n.snapshot = result_.graph;
    current_ = n.id;
    result_.tree.nodes.push_back(std::move(n));
  }

  void tick() {
    if (++turns_ > cfg_.max_steps) throw Abort{};
  }

  Outcome exec(const StrategyExpr& s) {
    try {
      return step(s);
    } catch (const Abort&) {
      return Outcome::Aborted;
    }
  }

  Outcome step(const StrategyExpr& s) {
    return std::visit([&](const auto& x) { return step_node(x); }, s.node);
  }

  Outcome step_node(const strat::One& x) {
    const Rule& r = rule(x.rule);
    auto matches = find_matches(result_.graph, r, location_, &rng_);
    if (matches.empty()) return Outcome::Fail;
    if (result_.steps >= cfg_.max_steps) throw Abort{};
    const Morphism& m = matches[rng_.uniform_below(matches.size())];
    StepInfo info = apply_in_place(result_.graph, r, m, rng_);
    location_ = advance(location_, m, info);
    ++result_.steps;
    record_node(r.name, m.summary(), info.created.size(), info.deleted.size());
    if (observer_) observer_(StepEvent{r.name, m, info, result_.graph});
    return Outcome::Success;
  }

  Outcome step_node(const strat::Probe& x) {
    return probe(result_.graph, rule(x.rule), location_, &rng_) ? Outcome::Success : Outcome::Fail;
  }

  Outcome step_node(const strat::Repeat& x) {
    for (;;) {
      tick();
      if (step(*x.body) == Outcome::Fail) return Outcome::Success;
    }
  }

  Outcome step_node(const strat::WhileDo& x) {
    for (;;) {
      tick();
      if (step(*x.guard) == Outcome::Fail) return Outcome::Success;
      if (step(*x.body) == Outcome::Fail) return Outcome::Success;
    }
  }

  Outcome step_node(const strat::Seq& x) {
    for (const auto& st : x.steps)
      if (step(*st) == Outcome::Fail) return Outcome::Fail;
    return Outcome::Success;
  }

  const RuleSet& rules_;
  const ExecConfig& cfg_;
  const std::function<void(const StepEvent&)>& observer_;
  Rng rng_;
  Location location_;
  ExecResult result_;
  std::size_t current_ = 0;
  std::size_t turns_ = 0;
};

}  // namespace

ExecResult execute(const PortGraph& g0, const StrategyExpr& s, const RuleSet& rules, const ExecConfig& cfg,
                   const std::function<void(const StepEvent&)>& observer) {
  return Interpreter(g0, rules, cfg, observer).run(s);
}

}  // namespace fdpg
