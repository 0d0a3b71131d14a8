#include "fdpg/rewrite.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace fdpg {

namespace {

constexpr const char* kNameAttr = "viewLabel";

std::string id_str(std::uint64_t v) { return "#" + std::to_string(v); }

bool constants_match(const Record& pattern, const Record& host, const std::set<std::string>* vars) {
  for (const auto& [k, v] : pattern) {
    if (k == kNameAttr) continue;
    if (vars && vars->count(k)) continue;
    auto it = host.find(k);
    if (it == host.end()) return false;
    try {
      if (v.compare(it->second) != 0) return false;
    } catch (const TypeMismatch&) {
      return false;
    }
  }
  if (vars)
    for (const auto& k : *vars)
      if (!host.count(k)) return false;
  return true;
}

const std::set<std::string>* vars_of(const Rule& r, std::uint64_t id) {
  auto it = r.lhs_variables.find(id);
  return it == r.lhs_variables.end() ? nullptr : &it->second;
}

/// name variable -> left element, following resolve_name's node-then-port rule.
std::map<std::string, std::uint64_t> name_table(const PortGraph& lhs) {
  std::set<std::string> labels;
  auto collect = [&](const Record& r) {
    if (auto it = r.find(kNameAttr); it != r.end() && it->second.tag() == AttrTag::Text)
      labels.insert(it->second.as_text());
  };
  for (const auto& [id, n] : lhs.nodes()) collect(n.attrs);
  for (const auto& [id, p] : lhs.ports()) collect(p.attrs);
  std::map<std::string, std::uint64_t> out;
  for (const auto& l : labels)
    if (auto id = cond::resolve_name(lhs, l)) out.emplace(l, *id);
  return out;
}

bool located_ok(const Location& loc, const std::set<std::uint64_t>& image) {
  for (auto id : image)
    if (loc.banned.count(id)) return false;
  if (!loc.position) return true;
  for (auto id : image)
    if (loc.position->count(id)) return true;
  return false;
}

bool saturated_ok(const PortGraph& host, const Rule& r, const Morphism& m, const std::set<std::uint64_t>& image) {
  for (PortId p : r.saturated) {
    PortId hp{m.elements.at(p.value)};
    if (!host.external_edges(hp, image).empty()) return false;
  }
  return true;
}

bool condition_ok(const PortGraph& host, const Rule& r, const Morphism& m, Rng* rng) {
  if (r.condition.clauses.empty()) return true;
  cond::EvalContext ctx{&host, &m.elements, &m.names, rng};
  return cond::evaluate(r.condition, ctx);
}

// ============================================================================
// Backtracking matcher
// ============================================================================

class Matcher {
 public:
  Matcher(const PortGraph& host, const Rule& r, const Location& loc, Rng* rng)
      : host_(host), rule_(r), loc_(loc), rng_(rng), names_(name_table(r.lhs)) {
    plan();
  }

  std::vector<Morphism> run() {
    if (order_.empty()) {
      if (!rule_.lhs.ports().empty()) return {};  // ports without owners cannot occur
      Morphism m;
      finish(m);
    } else {
      Morphism m;
      assign_node(0, m);
    }
    std::sort(results_.begin(), results_.end(),
              [](const Morphism& a, const Morphism& b) { return a.key() < b.key(); });
    return std::move(results_);
  }

 private:
  // Most constrained node first, then grow along left-hand edges.
  void plan() {
    const auto& nodes = rule_.lhs.nodes();
    auto weight = [&](NodeId n) {
      std::size_t w = nodes.at(n).attrs.size();
      for (PortId p : nodes.at(n).ports) w += rule_.lhs.attrs(p).size();
      return w;
    };
    std::set<NodeId> placed;
    while (placed.size() < nodes.size()) {
      std::optional<NodeId> best;
      bool best_adjacent = false;
      for (const auto& [n, nd] : nodes) {
        if (placed.count(n)) continue;
        bool adjacent = false;
        for (PortId p : nd.ports)
          for (EdgeId e : rule_.lhs.edges_of(p))
            if (placed.count(rule_.lhs.owner(rule_.lhs.opposite(e, p)))) adjacent = true;
        if (!best || (adjacent && !best_adjacent) || (adjacent == best_adjacent && weight(n) > weight(*best))) {
          best = n;
          best_adjacent = adjacent;
        }
      }
      placed.insert(*best);
      order_.push_back(*best);
    }
  }

  std::vector<NodeId> candidates(NodeId u, const Morphism& m) const {
    for (PortId pu : rule_.lhs.ports_of(u))
      for (EdgeId e : rule_.lhs.edges_of(pu)) {
        PortId q = rule_.lhs.opposite(e, pu);
        auto it = m.elements.find(q.value);
        if (it == m.elements.end()) continue;
        std::vector<NodeId> out;
        for (EdgeId he : host_.edges_of(PortId{it->second}))
          out.push_back(host_.owner(host_.opposite(he, PortId{it->second})));
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
      }
    std::vector<NodeId> out;
    for (const auto& [h, _] : host_.nodes()) out.push_back(h);
    return out;
  }

  void assign_node(std::size_t idx, Morphism& m) {
    if (idx == order_.size()) {
      finish(m);
      return;
    }
    const NodeId u = order_[idx];
    for (NodeId h : candidates(u, m)) {
      if (used_.count(h.value)) continue;
      if (!constants_match(rule_.lhs.attrs(u), host_.attrs(h), vars_of(rule_, u.value))) continue;
      m.elements[u.value] = h.value;
      used_.insert(h.value);
      assign_ports(idx, 0, m);
      used_.erase(h.value);
      m.elements.erase(u.value);
    }
  }

  void assign_ports(std::size_t idx, std::size_t k, Morphism& m) {
    const NodeId u = order_[idx];
    const auto& lports = rule_.lhs.ports_of(u);
    if (k == lports.size()) {
      std::vector<std::uint64_t> mapped_edges;
      if (edges_consistent(u, m, mapped_edges)) assign_node(idx + 1, m);
      for (auto e : mapped_edges) {
        m.elements.erase(e);
        used_.erase(edge_image_[e]);
        edge_image_.erase(e);
      }
      return;
    }
    const PortId pu = lports[k];
    const NodeId h{m.elements.at(u.value)};
    for (PortId hp : host_.ports_of(h)) {
      if (used_.count(hp.value)) continue;
      if (!constants_match(rule_.lhs.attrs(pu), host_.attrs(hp), vars_of(rule_, pu.value))) continue;
      m.elements[pu.value] = hp.value;
      used_.insert(hp.value);
      assign_ports(idx, k + 1, m);
      used_.erase(hp.value);
      m.elements.erase(pu.value);
    }
  }

  // Every left edge touching u whose far end is mapped must have a host edge
  // between the images; edge attributes are matched like node constants.
  bool edges_consistent(NodeId u, Morphism& m, std::vector<std::uint64_t>& mapped) {
    for (PortId pu : rule_.lhs.ports_of(u))
      for (EdgeId e : rule_.lhs.edges_of(pu)) {
        if (m.elements.count(e.value)) continue;
        PortId q = rule_.lhs.opposite(e, pu);
        auto it = m.elements.find(q.value);
        if (it == m.elements.end()) continue;
        auto he = host_.edge_between(PortId{m.elements.at(pu.value)}, PortId{it->second});
        if (!he || used_.count(he->value) ||
            !constants_match(rule_.lhs.attrs(e), host_.attrs(*he), vars_of(rule_, e.value)))
          return false;
        m.elements[e.value] = he->value;
        used_.insert(he->value);
        edge_image_[e.value] = he->value;
        mapped.push_back(e.value);
      }
    return true;
  }

  void finish(Morphism& m) {
    m.names.clear();
    for (const auto& [name, lid] : names_) m.names.emplace(name, m.elements.at(lid));
    const auto image = m.image();
    if (!located_ok(loc_, image)) return;
    if (!saturated_ok(host_, rule_, m, image)) return;
    if (!condition_ok(host_, rule_, m, rng_)) return;
    results_.push_back(m);
  }

  const PortGraph& host_;
  const Rule& rule_;
  const Location& loc_;
  Rng* rng_;
  std::map<std::string, std::uint64_t> names_;
  std::vector<NodeId> order_;
  std::set<std::uint64_t> used_;
  std::map<std::uint64_t, std::uint64_t> edge_image_;
  std::vector<Morphism> results_;
};

}  // namespace

// ============================================================================
// Morphism / Location helpers
// ============================================================================

std::set<std::uint64_t> Morphism::image() const {
  std::set<std::uint64_t> out;
  for (const auto& [l, h] : elements) out.insert(h);
  return out;
}

std::vector<std::uint64_t> Morphism::key() const {
  std::vector<std::uint64_t> out;
  out.reserve(elements.size());
  for (const auto& [l, h] : elements) out.push_back(h);
  return out;
}

std::string Morphism::summary() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [name, h] : names) {
    os << (first ? "" : ",") << name << "->" << h;
    first = false;
  }
  return os.str();
}

Location advance(const Location& loc, const Morphism& m, const StepInfo& step) {
  Location out = loc;
  const auto image = m.image();
  if (out.position) {
    for (auto id : image) out.position->erase(id);
    out.position->insert(step.position_added.begin(), step.position_added.end());
  }
  for (auto id : image) out.banned.erase(id);
  out.banned.insert(step.banned_added.begin(), step.banned_added.end());
  return out;
}

// ============================================================================
// Validation
// ============================================================================

ValidationReport validate_rule(const Rule& r) {
  ValidationReport rep;
  const PortGraph& L = r.lhs;
  const PortGraph& R = r.rhs;

  std::set<std::uint64_t> targets;
  for (const auto& [l, rr] : r.preserved) {
    auto lk = L.kind_of(l), rk = R.kind_of(rr);
    if (!lk || !rk) {
      rep.add("preserved-unknown", "preserved pair " + id_str(l) + " -> " + id_str(rr) + " names a missing element");
      continue;
    }
    if (*lk != *rk) rep.add("preserved-kind", "preserved pair " + id_str(l) + " -> " + id_str(rr) + " changes kind");
    if (!targets.insert(rr).second) rep.add("preserved-not-injective", "right element " + id_str(rr) + " preserved twice");
    if (*lk == ElementKind::Port && *rk == ElementKind::Port) {
      auto it = r.preserved.find(L.owner(PortId{l}).value);
      if (it == r.preserved.end() || it->second != R.owner(PortId{rr}).value)
        rep.add("preserved-owner", "preserved port " + id_str(l) + " does not keep its owner");
    }
    if (*lk == ElementKind::Edge && *rk == ElementKind::Edge) {
      auto [a, b] = L.endpoints(EdgeId{l});
      auto [c, d] = R.endpoints(EdgeId{rr});
      auto ia = r.preserved.find(a.value), ib = r.preserved.find(b.value);
      bool ok = ia != r.preserved.end() && ib != r.preserved.end() &&
                ((ia->second == c.value && ib->second == d.value) || (ia->second == d.value && ib->second == c.value));
      if (!ok) rep.add("preserved-edge", "preserved edge " + id_str(l) + " does not keep its endpoints");
    }
  }

  std::set<std::uint64_t> bridge_sources;
  for (const auto& b : r.bridges) {
    if (!L.contains(b.from)) rep.add("bridge-unknown", "bridge source " + id_str(b.from.value) + " is not a left port");
    if (!R.contains(b.to)) rep.add("bridge-unknown", "bridge target " + id_str(b.to.value) + " is not a right port");
    bridge_sources.insert(b.from.value);
  }
  for (PortId p : r.saturated)
    if (!L.contains(p)) rep.add("saturated-unknown", "saturated " + id_str(p.value) + " is not a left port");

  for (const auto& [p, pd] : L.ports()) {
    if (r.preserved.count(p.value) || r.saturated.count(p) || bridge_sources.count(p.value)) continue;
    rep.add("dangling-risk", "left port " + id_str(p.value) + " is deleted but neither saturated nor bridged");
  }

  for (const auto& [id, vars] : r.lhs_variables)
    if (!L.kind_of(id)) rep.add("variable-unknown", "variables declared on missing element " + id_str(id));

  cond::LhsScope scope{L, &r.lhs_variables};
  rep.merge(cond::validate_refs(r.condition, scope));

  for (const auto& u : r.updates) {
    if (!R.kind_of(u.target)) rep.add("update-target", "update target " + id_str(u.target) + " is not a right element");
    if (!u.expr) {
      rep.add("update-expr", "update of " + u.attr + " has no expression");
      continue;
    }
    rep.merge(cond::validate_refs(*u.expr, scope));
  }
  for (const auto& rc : r.recounts)
    if (!R.contains(rc.port)) rep.add("recount-target", "recount target " + id_str(rc.port.value) + " is not a right port");
  for (const auto* set : {&r.locate_m, &r.locate_n})
    for (auto id : *set)
      if (!R.kind_of(id)) rep.add("locate-unknown", "located element " + id_str(id) + " is not a right element");
  return rep;
}

// ============================================================================
// Matching
// ============================================================================

std::vector<Morphism> find_matches(const PortGraph& host, const Rule& r, const Location& loc, Rng* rng) {
  return Matcher(host, r, loc, rng).run();
}

bool probe(const PortGraph& host, const Rule& r, const Location& loc, Rng* rng) {
  return !find_matches(host, r, loc, rng).empty();
}

bool verify_morphism(const PortGraph& host, const Rule& r, const Morphism& m, const Location& loc, Rng* rng) {
  const PortGraph& L = r.lhs;
  const std::size_t expected = L.node_count() + L.port_count() + L.edge_count();
  if (m.elements.size() != expected) return false;

  std::set<std::uint64_t> seen;
  for (const auto& [l, h] : m.elements) {
    if (!seen.insert(h).second) return false;  // injectivity
    auto lk = L.kind_of(l);
    if (!lk || host.kind_of(h) != lk) return false;
    if (!constants_match(*L.find_attrs(l), *host.find_attrs(h), vars_of(r, l))) return false;
  }
  for (const auto& [p, pd] : L.ports())
    if (host.owner(PortId{m.elements.at(p.value)}).value != m.elements.at(pd.owner.value)) return false;
  for (const auto& [e, ed] : L.edges()) {
    auto [a, b] = host.endpoints(EdgeId{m.elements.at(e.value)});
    std::set<std::uint64_t> want{m.elements.at(ed.first.value), m.elements.at(ed.second.value)};
    if (want != std::set<std::uint64_t>{a.value, b.value}) return false;
  }
  for (const auto& [name, lid] : name_table(L)) {
    auto it = m.names.find(name);
    if (it == m.names.end() || it->second != m.elements.at(lid)) return false;
  }
  const auto image = m.image();
  return located_ok(loc, image) && saturated_ok(host, r, m, image) && condition_ok(host, r, m, rng);
}

// ============================================================================
// Rewriting
// ============================================================================

StepInfo apply_in_place(PortGraph& host, const Rule& r, const Morphism& m, Rng& rng) {
  const PortGraph& L = r.lhs;
  const PortGraph& R = r.rhs;
  StepInfo info;
  auto image_of = [&](std::uint64_t l) {
    auto it = m.elements.find(l);
    if (it == m.elements.end()) throw RewriteError("morphism does not cover left element " + id_str(l));
    return it->second;
  };

  // Everything below reads the pre-step graph first.
  cond::EvalContext ctx{&host, &m.elements, &m.names, &rng};
  std::vector<AttrValue> update_values;
  for (const auto& u : r.updates) update_values.push_back(cond::evaluate(*u.expr, ctx));

  std::set<std::uint64_t> matched_edges;
  for (const auto& [e, _] : L.edges()) matched_edges.insert(image_of(e.value));
  std::vector<std::vector<PortId>> bridge_ends;
  for (const auto& b : r.bridges) {
    std::vector<PortId> ends;
    PortId hp{image_of(b.from.value)};
    for (EdgeId e : host.edges_of(hp))
      if (!matched_edges.count(e.value)) ends.push_back(host.opposite(e, hp));
    bridge_ends.push_back(std::move(ends));
  }

  // Delete g(L) minus the preserved part.
  auto note_port = [&](PortId p) {
    for (EdgeId e : host.edges_of(p)) info.deleted.push_back(e.value);
    info.deleted.push_back(p.value);
  };
  for (const auto& [e, _] : L.edges())
    if (!r.preserved.count(e.value)) {
      EdgeId he{image_of(e.value)};
      if (host.contains(he)) {
        info.deleted.push_back(he.value);
        host.disconnect(he);
      }
    }
  for (const auto& [p, _] : L.ports())
    if (!r.preserved.count(p.value)) {
      PortId hp{image_of(p.value)};
      if (host.contains(hp)) {
        note_port(hp);
        host.remove_port(hp);
      }
    }
  for (const auto& [n, _] : L.nodes())
    if (!r.preserved.count(n.value)) {
      NodeId hn{image_of(n.value)};
      if (!host.contains(hn)) continue;
      for (PortId p : host.ports_of(hn)) note_port(p);
      info.deleted.push_back(hn.value);
      host.remove_node(hn);
    }
  std::sort(info.deleted.begin(), info.deleted.end());
  info.deleted.erase(std::unique(info.deleted.begin(), info.deleted.end()), info.deleted.end());

  // Realise the right-hand side.
  std::map<std::uint64_t, std::uint64_t> kept;  // right -> left
  for (const auto& [l, rr] : r.preserved) kept.emplace(rr, l);
  auto overlay = [&](std::uint64_t host_id, const Record& rec) {
    for (const auto& [k, v] : rec)
      if (k != kNameAttr) host.set_attr(host_id, k, v);
  };
  for (const auto& [n, nd] : R.nodes()) {
    if (auto it = kept.find(n.value); it != kept.end()) {
      info.realized[n.value] = image_of(it->second);
      overlay(info.realized[n.value], nd.attrs);
    } else {
      NodeId h = host.add_node(nd.attrs);
      info.realized[n.value] = h.value;
      info.created.push_back(h.value);
    }
  }
  for (const auto& [p, pd] : R.ports()) {
    if (auto it = kept.find(p.value); it != kept.end()) {
      info.realized[p.value] = image_of(it->second);
      overlay(info.realized[p.value], pd.attrs);
    } else {
      PortId h = host.attach_port(NodeId{info.realized.at(pd.owner.value)}, pd.attrs);
      info.realized[p.value] = h.value;
      info.created.push_back(h.value);
    }
  }
  for (const auto& [e, ed] : R.edges()) {
    if (auto it = kept.find(e.value); it != kept.end()) {
      info.realized[e.value] = image_of(it->second);
      overlay(info.realized[e.value], ed.attrs);
    } else {
      PortId a{info.realized.at(ed.first.value)}, b{info.realized.at(ed.second.value)};
      if (host.edge_between(a, b)) throw RewriteError("right-hand edge " + id_str(e.value) + " duplicates a host edge");
      EdgeId h = host.connect(a, b, ed.attrs);
      info.realized[e.value] = h.value;
      info.created.push_back(h.value);
    }
  }

  // Red edges; a copy that would duplicate an existing edge is skipped.
  for (std::size_t i = 0; i < r.bridges.size(); ++i) {
    PortId target{info.realized.at(r.bridges[i].to.value)};
    for (PortId q : bridge_ends[i]) {
      if (!host.contains(q) || q == target) continue;
      if (host.edge_between(target, q)) {
        ++info.bridge_duplicates;
        continue;
      }
      info.created.push_back(host.connect(target, q).value);
      ++info.bridged_edges;
    }
  }

  for (std::size_t i = 0; i < r.updates.size(); ++i)
    host.set_attr(info.realized.at(r.updates[i].target), r.updates[i].attr, update_values[i]);
  for (const auto& rc : r.recounts) {
    PortId hp{info.realized.at(rc.port.value)};
    host.set_attr(hp, rc.attr, static_cast<std::int64_t>(host.port_degree(hp)));
  }

  for (auto id : r.locate_m) info.position_added.insert(info.realized.at(id));
  for (auto id : r.locate_n) info.banned_added.insert(info.realized.at(id));
  return info;
}

std::pair<PortGraph, StepInfo> apply(const PortGraph& host, const Rule& r, const Morphism& m, Rng& rng) {
  PortGraph out = host;
  StepInfo info = apply_in_place(out, r, m, rng);
  return {std::move(out), std::move(info)};
}

}  // namespace fdpg
