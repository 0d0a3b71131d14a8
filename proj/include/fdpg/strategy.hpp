#pragma once

// Strategy expressions over rules (one, repeat, while-do, match probe,
// sequence) and their interpreter, which records a derivation tree.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fdpg/graph.hpp"
#include "fdpg/rewrite.hpp"

namespace fdpg {

struct StrategyExpr;
using StrategyPtr = std::shared_ptr<const StrategyExpr>;

namespace strat {
struct One {
  std::string rule;
};
struct Probe {
  std::string rule;
};
struct Repeat {
  StrategyPtr body;
};
struct WhileDo {
  StrategyPtr guard;  // a Probe
  StrategyPtr body;
};
struct Seq {
  std::vector<StrategyPtr> steps;
};
}  // namespace strat

struct StrategyExpr {
  std::variant<strat::One, strat::Probe, strat::Repeat, strat::WhileDo, strat::Seq> node;
};

StrategyPtr one(std::string rule);
StrategyPtr match(std::string rule);
StrategyPtr repeat(StrategyPtr body);
/// Guards are restricted to probes; anything else throws std::invalid_argument.
StrategyPtr while_do(StrategyPtr guard, StrategyPtr body);
StrategyPtr seq(std::vector<StrategyPtr> steps);

bool equal(const StrategyExpr& a, const StrategyExpr& b);
/// e.g. "while(match(IterOn))do(one(IterOn);repeat(one(Transitivity_1));one(IterOff))".
std::string to_string(const StrategyExpr& s);

// ---------------------------------------------------------------------------
// Derivation trees
// ---------------------------------------------------------------------------

struct DerivationNode {
  std::size_t id = 0;
  std::optional<std::size_t> parent;
  std::string rule;       // empty for the root
  std::string morphism;   // name-variable bindings of the applied match
  std::size_t created = 0;
  std::size_t deleted = 0;
  std::uint64_t hash = 0;               // structural hash of the resulting graph
  std::optional<PortGraph> snapshot;    // full mode only
};

struct DerivationTree {
  std::vector<DerivationNode> nodes;  // nodes[0] is the root (G0)

  std::vector<std::size_t> children(std::size_t id) const;
};

/// True iff no node has more than one child.
bool derivation_linear(const DerivationTree& t);

enum class ExportFormat { Dot, Json };

/// DOT nodes are labelled "step k: rule" (the root "step 0: G0"); JSON lists
/// the per-node summaries. Snapshots are not exported.
std::string export_derivation(const DerivationTree& t, ExportFormat f);
/// Format by name ("dot" / "json"); unknown names throw std::invalid_argument.
std::string export_derivation(const DerivationTree& t, const std::string& format);
/// Reads the JSON export back (summaries only).
DerivationTree import_derivation_json(const std::string& text);

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

enum class SnapshotMode { Full, StructuralHash };
enum class Outcome { Success, Fail, Aborted };

std::string_view to_string(Outcome o);

struct ExecConfig {
  std::uint64_t seed = 0;
  std::size_t max_steps = 1'000'000;  // bound on One applications (and loop turns)
  SnapshotMode snapshot_mode = SnapshotMode::Full;
};

struct StepEvent {
  const std::string& rule;
  const Morphism& match;
  const StepInfo& step;
  const PortGraph& graph;  // after the step
};

struct ExecResult {
  PortGraph graph;
  DerivationTree tree;
  Outcome outcome = Outcome::Success;
  std::size_t steps = 0;
};

using RuleSet = std::map<std::string, Rule, std::less<>>;

/// Runs `s` from g0. One(r) picks uniformly among the canonical match list;
/// Repeat and WhileDo never fail; Seq stops at the first failure. The
/// optional observer sees every successful One application.
ExecResult execute(const PortGraph& g0, const StrategyExpr& s, const RuleSet& rules, const ExecConfig& cfg,
                   const std::function<void(const StepEvent&)>& observer = {});

}  // namespace fdpg
