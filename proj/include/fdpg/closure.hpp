#pragma once

// FD-specific rules (IterOn, IterOff, ResetVisitedFlags, Transitivity_k),
// the transitive closure strategy, and the end-to-end closure pipeline.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fdpg/fdpg.hpp"
#include "fdpg/rewrite.hpp"
#include "fdpg/schema.hpp"
#include "fdpg/strategy.hpp"

namespace fdpg {

namespace rule_name {
inline constexpr const char* kIterOn = "IterOn";
inline constexpr const char* kIterOff = "IterOff";
inline constexpr const char* kReset = "ResetVisitedFlags";
std::string transitivity(std::size_t k);  // "Transitivity_<k>"
}  // namespace rule_name

struct IterRules {
  Rule iter_on;
  Rule iter_off;
  Rule reset;
};

IterRules gen_iter_rules();

/// Pivot F1 (arity k, iter and visit set) with left attributes B1..Bk and
/// right attribute A; feeders F2..F(k+1) with Fi+1 -> Bi. Adds NEW with the
/// union of the feeder left sides and right side A, UID = product of the
/// Fi.UID, unless a node with that UID exists. Throws std::invalid_argument
/// for k == 0.
Rule gen_transitivity_rule(std::size_t k);

/// Rules needed by build_strategy(max_arity).
RuleSet closure_rules(std::size_t max_arity);

/// For k = 1..max_arity:
///   while(match(IterOn))do(one(IterOn); repeat(one(Transitivity_k)); one(IterOff));
///   repeat(one(ResetVisitedFlags))
StrategyPtr build_strategy(std::size_t max_arity);

/// The part of build_strategy for a single arity.
StrategyPtr arity_pass(std::size_t k);

struct ClosureConfig {
  std::uint64_t seed = 0;
  std::optional<std::size_t> max_arity;  // empty: auto (largest FDLHS arity, re-read per sweep)
  bool outer_fixpoint = true;
  bool record_trace = false;
  std::size_t max_steps = 1'000'000;  // per arity pass
  std::size_t max_sweeps = 64;
};

struct DerivedFd {
  FD fd;
  std::int64_t uid = 0;           // smallest uid-product among nodes carrying fd
  std::vector<FD> constituents;   // input FDs whose primes multiply to uid (with repetition)
};

/// FD-node count observed after a Transitivity application.
struct MeasureSample {
  std::size_t sweep = 0;
  std::size_t arity = 0;
  std::size_t fd_nodes = 0;
};

struct ClosureResult {
  Schema schema_out;
  std::vector<DerivedFd> new_fds;  // sorted by FD
  std::optional<DerivationTree> trace;
  std::vector<MeasureSample> measures;
  Outcome outcome = Outcome::Success;
  std::size_t steps = 0;       // One applications
  std::size_t sweeps = 0;
  std::size_t initial_fd_nodes = 0;
  std::size_t final_fd_nodes = 0;
  std::vector<std::int64_t> created_uids;  // in creation order
  PortGraph graph;
};

/// Throws SchemaError / CyclicSchemaError for unusable input and
/// cond::EvalError if a uid-product overflows. An exhausted step bound is
/// reported through `outcome`.
ClosureResult transitive_closure(const Schema& schema, const ClosureConfig& cfg = {});

/// |V_FD| at G0 + |Σ+| - |V_FD| at Gi.
std::int64_t measure(const PortGraph& g, std::size_t sigma_plus_size, std::size_t initial_fd_count);
std::int64_t measure(std::size_t fd_nodes, std::size_t sigma_plus_size, std::size_t initial_fd_count);

std::size_t count_fd_nodes(const PortGraph& g);

}  // namespace fdpg
