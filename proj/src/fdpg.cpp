#include "fdpg/fdpg.hpp"

#include <algorithm>
#include <functional>

namespace fdpg {

namespace {

std::optional<std::string> text_attr(const Record& r, const char* k) {
  auto it = r.find(k);
  if (it == r.end() || it->second.tag() != AttrTag::Text) return std::nullopt;
  return it->second.as_text();
}

std::string role_of(const Record& r) { return text_attr(r, key::kRelDbType).value_or(""); }

std::string label_of(const Record& r) { return text_attr(r, key::kViewLabel).value_or(""); }

std::string id_str(std::uint64_t v) { return "#" + std::to_string(v); }

}  // namespace

std::vector<std::int64_t> first_primes(std::size_t n) {
  std::vector<std::int64_t> out;
  for (std::int64_t c = 2; out.size() < n; ++c) {
    bool prime = true;
    for (std::int64_t p : out) {
      if (p * p > c) break;
      if (c % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) out.push_back(c);
  }
  return out;
}

// ============================================================================
// Construction
// ============================================================================

std::pair<PortGraph, FdpgBinding> build_fdpg(const Schema& schema) {
  if (auto problems = schema_problems(schema); !problems.empty()) throw SchemaError(problems.front());
  if (auto cycle = detect_cycles(schema)) {
    std::string path;
    for (const auto& a : cycle->attributes) path += a + " -> ";
    throw CyclicSchemaError("cyclic dependencies: " + path + cycle->attributes.front());
  }

  PortGraph g;
  FdpgBinding bind;
  for (const auto& a : schema.attributes) {
    NodeId n = g.add_node({{key::kViewLabel, a}, {key::kRelDbType, role::kAttr}});
    PortId p = g.attach_port(n, {{key::kRelDbType, role::kPortFd}});
    bind.attr_node.emplace(a, AttrNodeRef{n, p});
  }

  auto primes = first_primes(schema.fds.size());
  for (std::size_t i = 0; i < schema.fds.size(); ++i) {
    const FD& fd = schema.fds[i];
    NodeId n = g.add_node({{key::kViewLabel, "FD" + std::to_string(primes[i])},
                           {key::kRelDbType, role::kFd},
                           {key::kUid, primes[i]},
                           {key::kIter, false},
                           {key::kVisit, false}});
    PortId lhs = g.attach_port(n, {{key::kViewLabel, "LHS"},
                                   {key::kRelDbType, role::kLhs},
                                   {key::kFunctionalArity, static_cast<std::int64_t>(fd.lhs.size())}});
    PortId rhs = g.attach_port(n, {{key::kViewLabel, "RHS"},
                                   {key::kRelDbType, role::kRhs},
                                   {key::kFunctionalArity, 1}});
    for (const auto& a : fd.lhs) g.connect(bind.attr_node.at(a).port, lhs);
    g.connect(rhs, bind.attr_node.at(fd.rhs).port);
    bind.fd_node.push_back({n, lhs, rhs});
  }
  return {std::move(g), std::move(bind)};
}

// ============================================================================
// Validation
// ============================================================================

ValidationReport validate_fdpg(const PortGraph& g) {
  ValidationReport rep;
  std::map<std::int64_t, NodeId> uids;

  for (const auto& [nid, nd] : g.nodes()) {
    const std::string role = role_of(nd.attrs);
    if (role == role::kAttr) {
      if (nd.ports.size() != 1 || role_of(g.attrs(nd.ports.front())) != role::kPortFd)
        rep.add("partition", "ATTR node " + id_str(nid.value) + " must own exactly one pFD port");
      continue;
    }
    if (role != role::kFd) {
      rep.add("partition", "node " + id_str(nid.value) + " has RelDbType '" + role + "'");
      continue;
    }

    std::vector<PortId> lhs, rhs;
    for (PortId p : nd.ports) {
      const std::string pr = role_of(g.attrs(p));
      if (pr == role::kLhs) lhs.push_back(p);
      else if (pr == role::kRhs) rhs.push_back(p);
      else rep.add("partition", "FD node " + id_str(nid.value) + " owns port with RelDbType '" + pr + "'");
    }
    if (lhs.size() != 1 || rhs.size() != 1) {
      rep.add("partition", "FD node " + id_str(nid.value) + " must own one FDLHS and one FDRHS port");
      continue;
    }

    for (PortId p : {lhs.front(), rhs.front()}) {
      auto arity = g.get_attr(p, key::kFunctionalArity);
      if (!arity || arity->tag() != AttrTag::Integer ||
          arity->as_int() != static_cast<std::int64_t>(g.port_degree(p)))
        rep.add("arity-mismatch", "port " + id_str(p.value) + " FunctionalArity differs from its degree " +
                                      std::to_string(g.port_degree(p)));
    }
    if (g.port_degree(lhs.front()) == 0)
      rep.add("empty-lhs", "FD node " + id_str(nid.value) + " has no left-hand side");
    if (g.port_degree(rhs.front()) != 1)
      rep.add("rhs-count", "FD node " + id_str(nid.value) + " must have exactly one right-hand side");

    std::set<NodeId> lhs_attrs;
    for (EdgeId e : g.edges_of(lhs.front())) lhs_attrs.insert(g.owner(g.opposite(e, lhs.front())));
    for (EdgeId e : g.edges_of(rhs.front()))
      if (lhs_attrs.count(g.owner(g.opposite(e, rhs.front()))))
        rep.add("rhs-in-lhs", "FD node " + id_str(nid.value) + " has its right side on the left");

    if (auto uid = g.get_attr(nid, key::kUid); uid && uid->tag() == AttrTag::Integer) {
      auto [it, fresh] = uids.emplace(uid->as_int(), nid);
      if (!fresh)
        rep.add("duplicate-uid", "FD nodes " + id_str(it->second.value) + " and " + id_str(nid.value) +
                                     " share UID " + std::to_string(uid->as_int()));
    } else {
      rep.add("missing-uid", "FD node " + id_str(nid.value) + " has no integer UID");
    }
  }

  for (const auto& [eid, ed] : g.edges()) {
    std::string a = role_of(g.attrs(ed.first)), b = role_of(g.attrs(ed.second));
    if (a > b) std::swap(a, b);
    // Allowed unordered pairs: {pFD, FDLHS} and {FDRHS, pFD}.
    bool allowed = (a == role::kLhs && b == role::kPortFd) || (a == role::kRhs && b == role::kPortFd);
    if (!allowed) rep.add("disallowed-pair", "edge " + id_str(eid.value) + " joins " + a + " and " + b);
  }
  return rep;
}

// ============================================================================
// Reading back
// ============================================================================

std::vector<FdNodeView> read_fd_nodes(const PortGraph& g) {
  std::vector<FdNodeView> out;
  for (const auto& [nid, nd] : g.nodes()) {
    if (role_of(nd.attrs) != role::kFd) continue;
    FdNodeView view{nid, {}, std::nullopt};
    for (PortId p : nd.ports) {
      const std::string pr = role_of(g.attrs(p));
      for (EdgeId e : g.edges_of(p)) {
        const std::string name = label_of(g.attrs(g.owner(g.opposite(e, p))));
        if (pr == role::kLhs) view.fd.lhs.insert(name);
        else if (pr == role::kRhs) view.fd.rhs = name;
      }
    }
    if (auto uid = g.get_attr(nid, key::kUid); uid && uid->tag() == AttrTag::Integer) view.uid = uid->as_int();
    out.push_back(std::move(view));
  }
  return out;
}

Schema extract_schema(const PortGraph& g) {
  if (auto rep = validate_fdpg(g); !rep.ok()) {
    // Duplicate UIDs do not affect the FD content; anything else does.
    for (const auto& v : rep.violations)
      if (v.code != "duplicate-uid" && v.code != "missing-uid") throw SchemaError("invalid FDPG: " + v.message);
  }
  Schema s;
  for (const auto& [nid, nd] : g.nodes())
    if (role_of(nd.attrs) == role::kAttr) s.attributes.push_back(label_of(nd.attrs));
  std::set<FD> seen;
  for (auto& view : read_fd_nodes(g))
    if (seen.insert(view.fd).second) s.fds.push_back(std::move(view.fd));
  return s;
}

// ============================================================================
// FDPG-path search
// ============================================================================

namespace {

using Mask = std::uint64_t;

struct PathIndex {
  struct Fd {
    NodeId node;
    Mask lhs = 0;
    std::vector<int> lhs_attrs;
    int rhs = -1;
    std::vector<EdgeId> edges;
  };
  std::vector<NodeId> attrs;
  std::map<NodeId, int> attr_pos;
  std::vector<Fd> fds;
};

PathIndex index_graph(const PortGraph& g) {
  PathIndex ix;
  for (const auto& [nid, nd] : g.nodes())
    if (role_of(nd.attrs) == role::kAttr) {
      ix.attr_pos[nid] = static_cast<int>(ix.attrs.size());
      ix.attrs.push_back(nid);
    }
  if (ix.attrs.size() > 64) throw GraphError("path search supports at most 64 attribute nodes");
  for (const auto& [nid, nd] : g.nodes()) {
    if (role_of(nd.attrs) != role::kFd) continue;
    PathIndex::Fd fd{nid, 0, {}, -1, {}};
    for (PortId p : nd.ports) {
      const std::string pr = role_of(g.attrs(p));
      for (EdgeId e : g.edges_of(p)) {
        auto it = ix.attr_pos.find(g.owner(g.opposite(e, p)));
        if (it == ix.attr_pos.end()) continue;
        fd.edges.push_back(e);
        if (pr == role::kLhs) {
          fd.lhs |= Mask{1} << it->second;
          fd.lhs_attrs.push_back(it->second);
        } else if (pr == role::kRhs) {
          fd.rhs = it->second;
        }
      }
    }
    if (fd.lhs != 0 && fd.rhs >= 0) ix.fds.push_back(std::move(fd));
  }
  return ix;
}

class PathSearch {
 public:
  explicit PathSearch(const PortGraph& g) : g_(g), ix_(index_graph(g)) {}

  const PathIndex& index() const { return ix_; }

  // Memoised; a query already on the stack counts as underivable, which
  // keeps the search finite on malformed cyclic graphs.
  const std::optional<SubgraphWitness>& solve(Mask from, int to) {
    auto key = std::pair{from, to};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    memo_[key] = std::nullopt;
    auto result = compute(from, to);
    return memo_[key] = std::move(result);
  }

 private:
  SubgraphWitness direct(const PathIndex::Fd& fd, int condition) const {
    SubgraphWitness w;
    w.condition = condition;
    w.fd_nodes.insert(fd.node);
    for (int a : fd.lhs_attrs) w.attr_nodes.insert(ix_.attrs[a]);
    w.attr_nodes.insert(ix_.attrs[fd.rhs]);
    w.edges.insert(fd.edges.begin(), fd.edges.end());
    return w;
  }

  static void absorb(SubgraphWitness& into, const SubgraphWitness& part) {
    into.fd_nodes.insert(part.fd_nodes.begin(), part.fd_nodes.end());
    into.attr_nodes.insert(part.attr_nodes.begin(), part.attr_nodes.end());
    into.edges.insert(part.edges.begin(), part.edges.end());
  }

  static bool better(const std::optional<SubgraphWitness>& cur, const SubgraphWitness& cand) {
    if (!cur) return true;
    if (cand.condition != cur->condition) return cand.condition < cur->condition;
    return cand.fd_nodes.size() < cur->fd_nodes.size();
  }

  std::optional<SubgraphWitness> compute(Mask from, int to) {
    for (const auto& fd : ix_.fds)
      if (fd.rhs == to && fd.lhs == from) return direct(fd, 1);

    std::optional<SubgraphWitness> best;
    for (const auto& fd : ix_.fds) {
      if (fd.rhs != to) continue;

      // For each left attribute of fd, the non-empty subsets of `from` that
      // reach it; then pick one subset per attribute so the union is `from`.
      std::vector<std::vector<std::pair<Mask, const SubgraphWitness*>>> options;
      bool feasible = true;
      for (int k : fd.lhs_attrs) {
        std::vector<std::pair<Mask, const SubgraphWitness*>> opts;
        for (Mask sub = from; sub != 0; sub = (sub - 1) & from)
          if (const auto& w = solve(sub, k)) opts.emplace_back(sub, &*w);
        if (opts.empty()) {
          feasible = false;
          break;
        }
        options.push_back(std::move(opts));
      }
      if (!feasible) continue;

      // reach[i]: union mask after choosing for the first i attributes -> choice trail.
      std::map<Mask, std::vector<std::size_t>> reach{{0, {}}};
      for (const auto& opts : options) {
        std::map<Mask, std::vector<std::size_t>> next;
        for (const auto& [m, trail] : reach)
          for (std::size_t o = 0; o < opts.size(); ++o) {
            Mask u = m | opts[o].first;
            if (!next.count(u)) {
              auto t = trail;
              t.push_back(o);
              next.emplace(u, std::move(t));
            }
          }
        reach = std::move(next);
      }
      auto hit = reach.find(from);
      if (hit == reach.end()) continue;

      SubgraphWitness w = direct(fd, fd.lhs_attrs.size() == 1 ? 2 : 3);
      for (int a = 0; a < 64; ++a)
        if (from >> a & 1) w.attr_nodes.insert(ix_.attrs[static_cast<std::size_t>(a)]);
      for (std::size_t i = 0; i < options.size(); ++i) absorb(w, *options[i][hit->second[i]].second);
      if (better(best, w)) best = std::move(w);
    }
    return best;
  }

  const PortGraph& g_;
  PathIndex ix_;
  std::map<std::pair<Mask, int>, std::optional<SubgraphWitness>> memo_;
};

}  // namespace

std::optional<SubgraphWitness> find_fdpg_path(const PortGraph& g, const std::set<NodeId>& from, NodeId to) {
  PathSearch search(g);
  const auto& ix = search.index();
  auto pos = [&](NodeId n) {
    auto it = ix.attr_pos.find(n);
    if (it == ix.attr_pos.end()) throw GraphError("node " + id_str(n.value) + " is not an attribute node");
    return it->second;
  };
  Mask m = 0;
  for (NodeId n : from) m |= Mask{1} << pos(n);
  int target = pos(to);
  if (m == 0) return std::nullopt;
  return search.solve(m, target);
}

}  // namespace fdpg
