#pragma once

// Functional Dependency Port Graphs: relational schemata encoded as port
// graphs with ATTR nodes (one pFD port each) and FD nodes (an FDLHS and an
// FDRHS port). Edges only join pFD-FDLHS and FDRHS-pFD.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fdpg/graph.hpp"
#include "fdpg/report.hpp"
#include "fdpg/schema.hpp"

namespace fdpg {

namespace key {
inline constexpr const char* kRelDbType = "RelDbType";
inline constexpr const char* kFunctionalArity = "FunctionalArity";
inline constexpr const char* kUid = "UID";
inline constexpr const char* kViewLabel = "viewLabel";
inline constexpr const char* kIter = "iter";
inline constexpr const char* kVisit = "visit";
}  // namespace key

namespace role {
inline constexpr const char* kAttr = "ATTR";
inline constexpr const char* kFd = "FD";
inline constexpr const char* kPortFd = "pFD";
inline constexpr const char* kLhs = "FDLHS";
inline constexpr const char* kRhs = "FDRHS";
}  // namespace role

struct AttrNodeRef {
  NodeId node;
  PortId port;  // pFD
};

struct FdNodeRef {
  NodeId node;
  PortId lhs;  // FDLHS
  PortId rhs;  // FDRHS
};

/// Where each schema element landed in the built graph.
struct FdpgBinding {
  std::map<std::string, AttrNodeRef> attr_node;
  std::vector<FdNodeRef> fd_node;  // indexed like Schema::fds
};

/// The first n primes, 2, 3, 5, ...
std::vector<std::int64_t> first_primes(std::size_t n);

/// Builds the FDPG of a valid acyclic schema. FD i (schema order) receives
/// the i-th prime as UID and the label "FD<uid>"; iter and visit start false.
/// Throws SchemaError / CyclicSchemaError.
std::pair<PortGraph, FdpgBinding> build_fdpg(const Schema& schema);

ValidationReport validate_fdpg(const PortGraph& g);

/// One FD node as read back from a graph.
struct FdNodeView {
  NodeId node;
  FD fd;
  std::optional<std::int64_t> uid;
};

/// FD nodes in id order. Requires a structurally valid FDPG.
std::vector<FdNodeView> read_fd_nodes(const PortGraph& g);

/// Inverse of build_fdpg: ATTR labels in node order and the distinct FDs in
/// FD-node order. Throws SchemaError if the graph is not a valid FDPG.
Schema extract_schema(const PortGraph& g);

struct SubgraphWitness {
  int condition = 0;  // which path condition holds at the top: 1, 2 or 3
  std::set<NodeId> fd_nodes;
  std::set<NodeId> attr_nodes;
  std::set<EdgeId> edges;
};

/// Searches an FDPG-path from the attribute nodes `from` to attribute node
/// `to`: a direct FD with exactly that left side (condition 1), a unary FD
/// into `to` fed by a path from `from` (condition 2), or an FD whose every
/// left attribute k_i is reached by a path from a subset X_i of `from` with
/// the X_i covering `from` (condition 3).
std::optional<SubgraphWitness> find_fdpg_path(const PortGraph& g, const std::set<NodeId>& from, NodeId to);

}  // namespace fdpg
