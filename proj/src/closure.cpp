#include "fdpg/closure.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace fdpg {

std::string rule_name::transitivity(std::size_t k) { return "Transitivity_" + std::to_string(k); }

namespace {

struct FdPattern {
  NodeId node;
  PortId lhs;
  PortId rhs;
};

FdPattern add_fd(PortGraph& g, const std::string& name, Record extra = {}, Record lhs_extra = {},
                 Record rhs_extra = {}) {
  Record rec{{key::kViewLabel, name}, {key::kRelDbType, role::kFd}};
  rec.merge(extra);
  NodeId n = g.add_node(std::move(rec));
  Record l{{key::kViewLabel, name + "_LHS"}, {key::kRelDbType, role::kLhs}};
  l.merge(lhs_extra);
  Record r{{key::kViewLabel, name + "_RHS"}, {key::kRelDbType, role::kRhs}};
  r.merge(rhs_extra);
  PortId lp = g.attach_port(n, std::move(l));
  PortId rp = g.attach_port(n, std::move(r));
  return {n, lp, rp};
}

std::pair<NodeId, PortId> add_attr(PortGraph& g, const std::string& name) {
  NodeId n = g.add_node({{key::kViewLabel, name}, {key::kRelDbType, role::kAttr}});
  PortId p = g.attach_port(n, {{key::kViewLabel, name + "_p"}, {key::kRelDbType, role::kPortFd}});
  return {n, p};
}

// Every left element kept under its own id (the right side starts as a copy).
void preserve_all(Rule& r) {
  for (const auto& [id, n] : r.lhs.nodes()) r.preserved[id.value] = id.value;
  for (const auto& [id, p] : r.lhs.ports()) r.preserved[id.value] = id.value;
  for (const auto& [id, e] : r.lhs.edges()) r.preserved[id.value] = id.value;
}

Rule single_fd_rule(const std::string& name, Record match, Record after) {
  Rule r;
  r.name = name;
  FdPattern f = add_fd(r.lhs, "F", std::move(match));
  r.rhs = r.lhs;
  for (auto& [k, v] : after) r.rhs.set_attr(f.node, k, v);
  preserve_all(r);
  r.bridges = {{f.lhs, f.lhs}, {f.rhs, f.rhs}};
  return r;
}

}  // namespace

IterRules gen_iter_rules() {
  return {
      single_fd_rule(rule_name::kIterOn, {{key::kIter, false}, {key::kVisit, false}},
                     {{key::kIter, true}, {key::kVisit, true}}),
      single_fd_rule(rule_name::kIterOff, {{key::kIter, true}}, {{key::kIter, false}}),
      single_fd_rule(rule_name::kReset, {{key::kVisit, true}}, {{key::kVisit, false}}),
  };
}

Rule gen_transitivity_rule(std::size_t k) {
  if (k == 0) throw std::invalid_argument("transitivity arity must be at least 1");
  Rule r;
  r.name = rule_name::transitivity(k);
  PortGraph& L = r.lhs;

  const auto k64 = static_cast<std::int64_t>(k);
  FdPattern pivot = add_fd(L, "F1", {{key::kIter, true}, {key::kVisit, true}}, {{key::kFunctionalArity, k64}},
                           {{key::kFunctionalArity, 1}});
  r.lhs_variables[pivot.node.value] = {key::kUid};
  auto [a_node, a_port] = add_attr(L, "A");
  L.connect(pivot.rhs, a_port);

  std::vector<FdPattern> feeders;
  for (std::size_t i = 1; i <= k; ++i) {
    auto [b_node, b_port] = add_attr(L, "B" + std::to_string(i));
    L.connect(b_port, pivot.lhs);
    FdPattern f = add_fd(L, "F" + std::to_string(i + 1), {}, {}, {{key::kFunctionalArity, 1}});
    r.lhs_variables[f.node.value] = {key::kUid};
    L.connect(f.rhs, b_port);
    feeders.push_back(f);
  }

  r.rhs = L;
  preserve_all(r);
  FdPattern fresh = add_fd(r.rhs, "NEW", {{key::kIter, false}, {key::kVisit, false}, {key::kUid, 0}},
                           {{key::kFunctionalArity, 0}}, {{key::kFunctionalArity, 1}});
  // Host-facing labels for the created ports.
  r.rhs.set_attr(fresh.lhs, key::kViewLabel, "LHS");
  r.rhs.set_attr(fresh.rhs, key::kViewLabel, "RHS");
  r.rhs.connect(fresh.rhs, a_port);

  for (const auto& f : feeders) {
    r.bridges.push_back({f.lhs, f.lhs});
    r.bridges.push_back({f.lhs, fresh.lhs});
  }

  std::string product = "F1.UID";
  for (std::size_t i = 2; i <= k + 1; ++i) product += "*F" + std::to_string(i) + ".UID";
  r.updates.push_back({fresh.node.value, key::kUid, cond::parse_expression(product)});
  r.recounts.push_back({fresh.lhs, key::kFunctionalArity});
  r.condition = cond::parse("NotNode(UID==" + product + ")");
  return r;
}

RuleSet closure_rules(std::size_t max_arity) {
  RuleSet rules;
  auto iter = gen_iter_rules();
  for (Rule* r : {&iter.iter_on, &iter.iter_off, &iter.reset}) rules.emplace(r->name, std::move(*r));
  for (std::size_t k = 1; k <= max_arity; ++k) {
    Rule t = gen_transitivity_rule(k);
    rules.emplace(t.name, std::move(t));
  }
  return rules;
}

StrategyPtr arity_pass(std::size_t k) {
  if (k == 0) throw std::invalid_argument("transitivity arity must be at least 1");
  return seq({
      while_do(match(rule_name::kIterOn),
               seq({one(rule_name::kIterOn), repeat(one(rule_name::transitivity(k))), one(rule_name::kIterOff)})),
      repeat(one(rule_name::kReset)),
  });
}

StrategyPtr build_strategy(std::size_t max_arity) {
  if (max_arity == 0) throw std::invalid_argument("max_arity must be at least 1");
  std::vector<StrategyPtr> passes;
  for (std::size_t k = 1; k <= max_arity; ++k) {
    auto pass = std::get<strat::Seq>(arity_pass(k)->node).steps;
    passes.insert(passes.end(), pass.begin(), pass.end());
  }
  return seq(std::move(passes));
}

std::size_t count_fd_nodes(const PortGraph& g) {
  std::size_t n = 0;
  for (const auto& [id, nd] : g.nodes()) {
    auto it = nd.attrs.find(key::kRelDbType);
    if (it != nd.attrs.end() && it->second.tag() == AttrTag::Text && it->second.as_text() == role::kFd) ++n;
  }
  return n;
}

std::int64_t measure(std::size_t fd_nodes, std::size_t sigma_plus_size, std::size_t initial_fd_count) {
  return static_cast<std::int64_t>(initial_fd_count) + static_cast<std::int64_t>(sigma_plus_size) -
         static_cast<std::int64_t>(fd_nodes);
}

std::int64_t measure(const PortGraph& g, std::size_t sigma_plus_size, std::size_t initial_fd_count) {
  return measure(count_fd_nodes(g), sigma_plus_size, initial_fd_count);
}

namespace {

std::size_t largest_arity(const PortGraph& g) {
  std::size_t k = 0;
  for (const auto& [id, p] : g.ports()) {
    auto role = p.attrs.find(key::kRelDbType);
    if (role == p.attrs.end() || role->second.tag() != AttrTag::Text || role->second.as_text() != role::kLhs) continue;
    k = std::max(k, g.port_degree(id));
  }
  return k;
}

void append_trace(DerivationTree& into, const DerivationTree& part) {
  if (into.nodes.empty()) {
    into = part;
    return;
  }
  const std::size_t offset = into.nodes.size() - 1;  // part's root is our last node
  for (std::size_t i = 1; i < part.nodes.size(); ++i) {
    DerivationNode n = part.nodes[i];
    n.id += offset;
    if (n.parent) *n.parent += offset;
    into.nodes.push_back(std::move(n));
  }
}

std::vector<FD> factorize(std::int64_t uid, const std::map<std::int64_t, FD>& by_prime) {
  std::vector<FD> out;
  for (const auto& [p, fd] : by_prime) {
    while (uid % p == 0) {
      uid /= p;
      out.push_back(fd);
    }
  }
  if (uid != 1) throw std::logic_error("uid-product has a factor outside the input primes");
  return out;
}

}  // namespace

ClosureResult transitive_closure(const Schema& schema, const ClosureConfig& cfg) {
  if (cfg.max_arity && *cfg.max_arity == 0) throw std::invalid_argument("max_arity must be at least 1");

  auto [g, bind] = build_fdpg(schema);
  std::map<std::int64_t, FD> by_prime;
  {
    auto primes = first_primes(schema.fds.size());
    for (std::size_t i = 0; i < schema.fds.size(); ++i) by_prime.emplace(primes[i], schema.fds[i]);
  }

  ClosureResult res;
  res.initial_fd_nodes = count_fd_nodes(g);
  RuleSet rules;
  std::size_t rules_arity = 0;
  if (cfg.record_trace) res.trace.emplace();

  for (std::size_t sweep = 0;; ++sweep) {
    if (sweep == cfg.max_sweeps) {
      res.outcome = Outcome::Aborted;
      break;
    }
    const std::size_t arity = cfg.max_arity ? *cfg.max_arity : largest_arity(g);
    if (arity == 0) break;  // no FDs
    if (arity > rules_arity) {
      rules = closure_rules(arity);
      rules_arity = arity;
    }
    const std::size_t created_before = res.created_uids.size();

    for (std::size_t k = 1; k <= arity && res.outcome != Outcome::Aborted; ++k) {
      ExecConfig ec;
      ec.seed = mix_seed(mix_seed(cfg.seed, sweep), k);
      ec.max_steps = cfg.max_steps;
      ec.snapshot_mode = SnapshotMode::StructuralHash;
      const std::string trans = rule_name::transitivity(k);
      auto observer = [&](const StepEvent& ev) {
        if (ev.rule != trans) return;
        res.measures.push_back({sweep, k, count_fd_nodes(ev.graph)});
        for (std::uint64_t id : ev.step.created)
          if (ev.graph.kind_of(id) == ElementKind::Node)
            if (auto uid = ev.graph.get_attr(NodeId{id}, key::kUid)) res.created_uids.push_back(uid->as_int());
      };
      ExecResult run = execute(g, *arity_pass(k), rules, ec, observer);
      g = std::move(run.graph);
      res.steps += run.steps;
      if (res.trace) append_trace(*res.trace, run.tree);
      if (run.outcome == Outcome::Aborted) res.outcome = Outcome::Aborted;
    }
    ++res.sweeps;
    if (res.outcome == Outcome::Aborted || !cfg.outer_fixpoint) break;
    if (res.created_uids.size() == created_before) break;
  }

  res.final_fd_nodes = count_fd_nodes(g);
  res.schema_out = extract_schema(g);

  std::set<FD> input(schema.fds.begin(), schema.fds.end());
  std::map<FD, std::int64_t> best;
  for (const auto& v : read_fd_nodes(g)) {
    if (input.count(v.fd) || !v.uid) continue;
    auto [it, fresh] = best.emplace(v.fd, *v.uid);
    if (!fresh) it->second = std::min(it->second, *v.uid);
  }
  for (const auto& [fd, uid] : best) res.new_fds.push_back({fd, uid, factorize(uid, by_prime)});
  res.graph = std::move(g);
  return res;
}

}  // namespace fdpg
