#pragma once

// Attributed port graph: nodes own ports, edges join two ports, and every
// element carries a record of typed attribute values.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fdpg {

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when two attribute values of incompatible tags are compared.
class TypeMismatch : public GraphError {
 public:
  using GraphError::GraphError;
};

// ---------------------------------------------------------------------------
// Attribute values and records
// ---------------------------------------------------------------------------

enum class AttrTag { Integer, Float, Text, Boolean };

class AttrValue {
 public:
  AttrValue() : v_(std::int64_t{0}) {}
  AttrValue(std::int64_t i) : v_(i) {}  // NOLINT(google-explicit-constructor)
  AttrValue(int i) : v_(std::int64_t{i}) {}  // NOLINT
  AttrValue(double d) : v_(d) {}  // NOLINT
  AttrValue(std::string s) : v_(std::move(s)) {}  // NOLINT
  AttrValue(const char* s) : v_(std::string(s)) {}  // NOLINT
  AttrValue(bool b) : v_(b) {}  // NOLINT

  AttrTag tag() const noexcept { return static_cast<AttrTag>(v_.index()); }
  bool is_number() const noexcept { return tag() == AttrTag::Integer || tag() == AttrTag::Float; }

  std::int64_t as_int() const;
  double as_float() const;  // Integer widens
  const std::string& as_text() const;
  bool as_bool() const;

  /// Three-way comparison with Integer/Float numeric coercion; any other
  /// cross-tag comparison throws TypeMismatch. Booleans order false < true.
  std::partial_ordering compare(const AttrValue& other) const;

  /// Same tag and same payload; no coercion (used for structural equality).
  bool identical(const AttrValue& other) const noexcept { return v_ == other.v_; }

  /// Literal rendering: integers plainly, floats always with '.' or exponent,
  /// text double-quoted with \" and \\ escapes, booleans as true/false.
  std::string to_literal() const;

 private:
  std::variant<std::int64_t, double, std::string, bool> v_;
};

std::string_view tag_name(AttrTag t) noexcept;

/// Attribute name -> value. Names are unique by construction of std::map.
using Record = std::map<std::string, AttrValue, std::less<>>;

// ---------------------------------------------------------------------------
// Identifiers
// ---------------------------------------------------------------------------

// All three id kinds are drawn from one counter per graph, so a raw value
// names at most one element of any kind. Ids are never reused.
template <class Tag>
struct Id {
  std::uint64_t value = 0;
  friend auto operator<=>(const Id&, const Id&) = default;
};

using NodeId = Id<struct NodeTag>;
using PortId = Id<struct PortTag>;
using EdgeId = Id<struct EdgeTag>;

enum class ElementKind { Node, Port, Edge };

// ---------------------------------------------------------------------------
// PortGraph
// ---------------------------------------------------------------------------

class PortGraph {
 public:
  struct NodeData {
    Record attrs;
    std::vector<PortId> ports;
  };
  struct PortData {
    NodeId owner;
    Record attrs;
    std::vector<EdgeId> edges;
  };
  struct EdgeData {
    PortId first;
    PortId second;
    Record attrs;
  };

  NodeId add_node(Record attrs = {});
  PortId attach_port(NodeId owner, Record attrs = {});
  EdgeId connect(PortId a, PortId b, Record attrs = {});

  void disconnect(EdgeId e);
  void remove_port(PortId p);  // cascades to incident edges
  void remove_node(NodeId n);  // cascades to ports and their edges

  bool contains(NodeId n) const { return nodes_.count(n) != 0; }
  bool contains(PortId p) const { return ports_.count(p) != 0; }
  bool contains(EdgeId e) const { return edges_.count(e) != 0; }
  std::optional<ElementKind> kind_of(std::uint64_t raw) const;

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t port_count() const noexcept { return ports_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  std::size_t port_degree(PortId p) const;
  NodeId owner(PortId p) const;
  const std::vector<PortId>& ports_of(NodeId n) const;
  const std::vector<EdgeId>& edges_of(PortId p) const;
  std::pair<PortId, PortId> endpoints(EdgeId e) const;
  PortId opposite(EdgeId e, PortId from) const;
  std::optional<EdgeId> edge_between(PortId a, PortId b) const;

  /// Edges incident to `p` whose opposite port is not listed in `inside`.
  /// `inside` holds raw element ids and must contain p.
  std::vector<EdgeId> external_edges(PortId p, const std::set<std::uint64_t>& inside) const;

  const Record& attrs(NodeId n) const;
  const Record& attrs(PortId p) const;
  const Record& attrs(EdgeId e) const;
  /// Record of a node or port given its raw id (ports are addressed like nodes).
  const Record* find_attrs(std::uint64_t raw) const;

  std::optional<AttrValue> get_attr(NodeId n, std::string_view key) const;
  std::optional<AttrValue> get_attr(PortId p, std::string_view key) const;
  std::optional<AttrValue> get_attr(EdgeId e, std::string_view key) const;
  void set_attr(NodeId n, const std::string& key, AttrValue v);
  void set_attr(PortId p, const std::string& key, AttrValue v);
  void set_attr(EdgeId e, const std::string& key, AttrValue v);
  void set_attr(std::uint64_t raw, const std::string& key, AttrValue v);

  const std::map<NodeId, NodeData>& nodes() const noexcept { return nodes_; }
  const std::map<PortId, PortData>& ports() const noexcept { return ports_; }
  const std::map<EdgeId, EdgeData>& edges() const noexcept { return edges_; }

  /// Full consistency check; returns one message per broken invariant.
  std::vector<std::string> audit() const;

  /// Deterministic text dump (ids, records, incidence) used for hashing and
  /// determinism checks.
  std::string canonical_text() const;
  std::uint64_t structural_hash() const;

 private:
  std::uint64_t fresh() { return ++next_id_; }
  NodeData& node_ref(NodeId n);
  PortData& port_ref(PortId p);
  EdgeData& edge_ref(EdgeId e);
  const NodeData& node_ref(NodeId n) const;
  const PortData& port_ref(PortId p) const;
  const EdgeData& edge_ref(EdgeId e) const;

  std::uint64_t next_id_ = 0;
  std::map<NodeId, NodeData> nodes_;
  std::map<PortId, PortData> ports_;
  std::map<EdgeId, EdgeData> edges_;
  std::map<std::pair<PortId, PortId>, EdgeId> pair_index_;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

}  // namespace fdpg
