#pragma once

// Port graph rewrite rules L => R with an arrow-node payload (condition,
// bridges, saturated ports, attribute updates, located marks), injective
// matching, and rewriting steps.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fdpg/condition.hpp"
#include "fdpg/graph.hpp"
#include "fdpg/report.hpp"
#include "fdpg/rng.hpp"

namespace fdpg {

/// Red edge through the arrow node: host edges reaching the image of `from`
/// from outside the match are copied onto the realisation of `to`.
struct Bridge {
  PortId from;  // left-hand port
  PortId to;    // right-hand port
};

/// Assignment evaluated under the match and written to a right-hand element.
struct Update {
  std::uint64_t target;  // right-hand element id
  std::string attr;
  cond::ExprPtr expr;
};

/// After rewiring, `attr` of the realised right-hand port is set to its degree.
struct Recount {
  PortId port;
  std::string attr;
};

struct Rule {
  std::string name;
  PortGraph lhs;
  PortGraph rhs;
  /// Left element id -> right element id for elements kept by the step
  /// (nodes, ports and edges; kinds must agree).
  std::map<std::uint64_t, std::uint64_t> preserved;
  /// Attributes of left elements that act as match variables: the host must
  /// define them, any value binds. All other attributes except viewLabel are
  /// constants; viewLabel holds the element's name variable.
  std::map<std::uint64_t, std::set<std::string>> lhs_variables;
  std::set<PortId> saturated;
  cond::Condition condition;
  std::vector<Bridge> bridges;
  std::vector<Update> updates;
  std::vector<Recount> recounts;
  std::set<std::uint64_t> locate_m;  // right elements added to the position set
  std::set<std::uint64_t> locate_n;  // right elements added to the banned set
};

/// Injective map of left elements into a host graph.
struct Morphism {
  std::map<std::uint64_t, std::uint64_t> elements;  // left id -> host id
  std::map<std::string, std::uint64_t, std::less<>> names;  // name variable -> host id

  std::set<std::uint64_t> image() const;
  /// Host ids in left-id order; morphism lists are sorted by this key.
  std::vector<std::uint64_t> key() const;
  std::string summary() const;
};

/// Position subgraph P and banned subgraph Q of a located graph. An absent
/// position set stands for the whole graph.
struct Location {
  std::optional<std::set<std::uint64_t>> position;
  std::set<std::uint64_t> banned;
};

struct StepInfo {
  std::vector<std::uint64_t> created;
  std::vector<std::uint64_t> deleted;
  std::map<std::uint64_t, std::uint64_t> realized;  // right id -> host id
  std::set<std::uint64_t> position_added;  // g(M)
  std::set<std::uint64_t> banned_added;    // g(N)
  std::size_t bridged_edges = 0;
  std::size_t bridge_duplicates = 0;  // copies skipped: edge already present
};

class RewriteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ValidationReport validate_rule(const Rule& r);

/// All matches of r in host satisfying structure, constants, saturation,
/// location and the rule condition, in canonical (key) order. `rng` is only
/// consulted by conditions that call random().
std::vector<Morphism> find_matches(const PortGraph& host, const Rule& r, const Location& loc = {},
                                   Rng* rng = nullptr);

/// Independent brute-force re-check of a single morphism.
bool verify_morphism(const PortGraph& host, const Rule& r, const Morphism& m, const Location& loc = {},
                     Rng* rng = nullptr);

bool probe(const PortGraph& host, const Rule& r, const Location& loc = {}, Rng* rng = nullptr);

/// Rewrites `host` in place along m. Throws RewriteError / cond::EvalError.
StepInfo apply_in_place(PortGraph& host, const Rule& r, const Morphism& m, Rng& rng);

std::pair<PortGraph, StepInfo> apply(const PortGraph& host, const Rule& r, const Morphism& m, Rng& rng);

/// P' = (P \ g(L)) ∪ g(M), Q' = (Q \ g(L)) ∪ g(N). A whole-graph position stays whole.
Location advance(const Location& loc, const Morphism& m, const StepInfo& step);

}  // namespace fdpg
