#include "fdpg/graph.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace fdpg {

// ============================================================================
// AttrValue
// ============================================================================

std::string_view tag_name(AttrTag t) noexcept {
  switch (t) {
    case AttrTag::Integer: return "Integer";
    case AttrTag::Float: return "Float";
    case AttrTag::Text: return "Text";
    case AttrTag::Boolean: return "Boolean";
  }
  return "?";
}

std::int64_t AttrValue::as_int() const {
  if (auto* i = std::get_if<std::int64_t>(&v_)) return *i;
  throw TypeMismatch("expected Integer, got " + std::string(tag_name(tag())));
}

double AttrValue::as_float() const {
  if (auto* d = std::get_if<double>(&v_)) return *d;
  if (auto* i = std::get_if<std::int64_t>(&v_)) return static_cast<double>(*i);
  throw TypeMismatch("expected number, got " + std::string(tag_name(tag())));
}

const std::string& AttrValue::as_text() const {
  if (auto* s = std::get_if<std::string>(&v_)) return *s;
  throw TypeMismatch("expected Text, got " + std::string(tag_name(tag())));
}

bool AttrValue::as_bool() const {
  if (auto* b = std::get_if<bool>(&v_)) return *b;
  throw TypeMismatch("expected Boolean, got " + std::string(tag_name(tag())));
}

std::partial_ordering AttrValue::compare(const AttrValue& other) const {
  if (tag() == AttrTag::Integer && other.tag() == AttrTag::Integer)
    return as_int() <=> other.as_int();
  if (is_number() && other.is_number()) return as_float() <=> other.as_float();
  if (tag() != other.tag())
    throw TypeMismatch("cannot compare " + std::string(tag_name(tag())) + " with " +
                       std::string(tag_name(other.tag())));
  if (tag() == AttrTag::Text) return as_text() <=> other.as_text();
  return as_bool() <=> other.as_bool();
}

std::string AttrValue::to_literal() const {
  switch (tag()) {
    case AttrTag::Integer: return std::to_string(as_int());
    case AttrTag::Float: {
      char buf[64];
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, std::get<double>(v_));
      std::string s(buf, end);
      if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
      return s;
    }
    case AttrTag::Text: {
      std::string out = "\"";
      for (char c : as_text()) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
      }
      return out + "\"";
    }
    case AttrTag::Boolean: return as_bool() ? "true" : "false";
  }
  return {};
}

// ============================================================================
// PortGraph: construction
// ============================================================================

NodeId PortGraph::add_node(Record attrs) {
  NodeId id{fresh()};
  nodes_.emplace(id, NodeData{std::move(attrs), {}});
  return id;
}

PortId PortGraph::attach_port(NodeId owner, Record attrs) {
  auto& n = node_ref(owner);
  PortId id{fresh()};
  ports_.emplace(id, PortData{owner, std::move(attrs), {}});
  n.ports.push_back(id);
  return id;
}

namespace {
std::pair<PortId, PortId> ordered(PortId a, PortId b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }
}  // namespace

EdgeId PortGraph::connect(PortId a, PortId b, Record attrs) {
  auto& pa = port_ref(a);
  auto& pb = port_ref(b);
  if (a == b) throw GraphError("cannot connect port " + std::to_string(a.value) + " to itself");
  auto key = ordered(a, b);
  if (pair_index_.count(key))
    throw GraphError("duplicate edge between ports " + std::to_string(a.value) + " and " +
                     std::to_string(b.value));
  EdgeId id{fresh()};
  edges_.emplace(id, EdgeData{a, b, std::move(attrs)});
  pair_index_.emplace(key, id);
  pa.edges.push_back(id);
  pb.edges.push_back(id);
  return id;
}

void PortGraph::disconnect(EdgeId e) {
  auto it = edges_.find(e);
  if (it == edges_.end()) throw GraphError("unknown edge " + std::to_string(e.value));
  auto [a, b] = std::pair{it->second.first, it->second.second};
  for (PortId p : {a, b}) {
    auto& v = port_ref(p).edges;
    v.erase(std::remove(v.begin(), v.end(), e), v.end());
  }
  pair_index_.erase(ordered(a, b));
  edges_.erase(it);
}

void PortGraph::remove_port(PortId p) {
  auto incident = port_ref(p).edges;
  for (EdgeId e : incident) disconnect(e);
  auto& owner_ports = node_ref(ports_.at(p).owner).ports;
  owner_ports.erase(std::remove(owner_ports.begin(), owner_ports.end(), p), owner_ports.end());
  ports_.erase(p);
}

void PortGraph::remove_node(NodeId n) {
  auto owned = node_ref(n).ports;
  for (PortId p : owned) remove_port(p);
  nodes_.erase(n);
}

// ============================================================================
// PortGraph: queries
// ============================================================================

std::optional<ElementKind> PortGraph::kind_of(std::uint64_t raw) const {
  if (nodes_.count(NodeId{raw})) return ElementKind::Node;
  if (ports_.count(PortId{raw})) return ElementKind::Port;
  if (edges_.count(EdgeId{raw})) return ElementKind::Edge;
  return std::nullopt;
}

std::size_t PortGraph::port_degree(PortId p) const { return port_ref(p).edges.size(); }
NodeId PortGraph::owner(PortId p) const { return port_ref(p).owner; }
const std::vector<PortId>& PortGraph::ports_of(NodeId n) const { return node_ref(n).ports; }
const std::vector<EdgeId>& PortGraph::edges_of(PortId p) const { return port_ref(p).edges; }

std::pair<PortId, PortId> PortGraph::endpoints(EdgeId e) const {
  const auto& d = edge_ref(e);
  return {d.first, d.second};
}

PortId PortGraph::opposite(EdgeId e, PortId from) const {
  const auto& d = edge_ref(e);
  if (d.first == from) return d.second;
  if (d.second == from) return d.first;
  throw GraphError("port " + std::to_string(from.value) + " is not an endpoint of edge " +
                   std::to_string(e.value));
}

std::optional<EdgeId> PortGraph::edge_between(PortId a, PortId b) const {
  auto it = pair_index_.find(ordered(a, b));
  if (it == pair_index_.end()) return std::nullopt;
  return it->second;
}

std::vector<EdgeId> PortGraph::external_edges(PortId p, const std::set<std::uint64_t>& inside) const {
  const auto& d = port_ref(p);
  if (!inside.count(p.value))
    throw GraphError("port " + std::to_string(p.value) + " is not part of the subgraph");
  std::vector<EdgeId> out;
  for (EdgeId e : d.edges) {
    PortId q = opposite(e, p);
    if (!inside.count(q.value)) out.push_back(e);
  }
  return out;
}

const Record& PortGraph::attrs(NodeId n) const { return node_ref(n).attrs; }
const Record& PortGraph::attrs(PortId p) const { return port_ref(p).attrs; }
const Record& PortGraph::attrs(EdgeId e) const { return edge_ref(e).attrs; }

const Record* PortGraph::find_attrs(std::uint64_t raw) const {
  if (auto it = nodes_.find(NodeId{raw}); it != nodes_.end()) return &it->second.attrs;
  if (auto it = ports_.find(PortId{raw}); it != ports_.end()) return &it->second.attrs;
  if (auto it = edges_.find(EdgeId{raw}); it != edges_.end()) return &it->second.attrs;
  return nullptr;
}

namespace {
std::optional<AttrValue> lookup(const Record& r, std::string_view key) {
  auto it = r.find(key);
  if (it == r.end()) return std::nullopt;
  return it->second;
}
}  // namespace

std::optional<AttrValue> PortGraph::get_attr(NodeId n, std::string_view k) const { return lookup(attrs(n), k); }
std::optional<AttrValue> PortGraph::get_attr(PortId p, std::string_view k) const { return lookup(attrs(p), k); }
std::optional<AttrValue> PortGraph::get_attr(EdgeId e, std::string_view k) const { return lookup(attrs(e), k); }

void PortGraph::set_attr(NodeId n, const std::string& k, AttrValue v) { node_ref(n).attrs[k] = std::move(v); }
void PortGraph::set_attr(PortId p, const std::string& k, AttrValue v) { port_ref(p).attrs[k] = std::move(v); }
void PortGraph::set_attr(EdgeId e, const std::string& k, AttrValue v) { edge_ref(e).attrs[k] = std::move(v); }

void PortGraph::set_attr(std::uint64_t raw, const std::string& k, AttrValue v) {
  auto kind = kind_of(raw);
  if (!kind) throw GraphError("unknown element " + std::to_string(raw));
  switch (*kind) {
    case ElementKind::Node: set_attr(NodeId{raw}, k, std::move(v)); break;
    case ElementKind::Port: set_attr(PortId{raw}, k, std::move(v)); break;
    case ElementKind::Edge: set_attr(EdgeId{raw}, k, std::move(v)); break;
  }
}

PortGraph::NodeData& PortGraph::node_ref(NodeId n) {
  auto it = nodes_.find(n);
  if (it == nodes_.end()) throw GraphError("unknown node " + std::to_string(n.value));
  return it->second;
}
PortGraph::PortData& PortGraph::port_ref(PortId p) {
  auto it = ports_.find(p);
  if (it == ports_.end()) throw GraphError("unknown port " + std::to_string(p.value));
  return it->second;
}
PortGraph::EdgeData& PortGraph::edge_ref(EdgeId e) {
  auto it = edges_.find(e);
  if (it == edges_.end()) throw GraphError("unknown edge " + std::to_string(e.value));
  return it->second;
}
const PortGraph::NodeData& PortGraph::node_ref(NodeId n) const { return const_cast<PortGraph*>(this)->node_ref(n); }
const PortGraph::PortData& PortGraph::port_ref(PortId p) const { return const_cast<PortGraph*>(this)->port_ref(p); }
const PortGraph::EdgeData& PortGraph::edge_ref(EdgeId e) const { return const_cast<PortGraph*>(this)->edge_ref(e); }

// ============================================================================
// Audit and canonical form
// ============================================================================

std::vector<std::string> PortGraph::audit() const {
  std::vector<std::string> issues;
  auto say = [&](std::string s) { issues.push_back(std::move(s)); };
  for (const auto& [pid, pd] : ports_) {
    auto it = nodes_.find(pd.owner);
    if (it == nodes_.end()) {
      say("port " + std::to_string(pid.value) + " has missing owner");
      continue;
    }
    const auto& list = it->second.ports;
    if (std::count(list.begin(), list.end(), pid) != 1)
      say("port " + std::to_string(pid.value) + " not listed exactly once by its owner");
    for (EdgeId e : pd.edges)
      if (!edges_.count(e)) say("port " + std::to_string(pid.value) + " lists missing edge");
  }
  for (const auto& [nid, nd] : nodes_)
    for (PortId p : nd.ports) {
      auto it = ports_.find(p);
      if (it == ports_.end() || it->second.owner != nid)
        say("node " + std::to_string(nid.value) + " lists foreign port " + std::to_string(p.value));
    }
  std::set<std::pair<PortId, PortId>> seen;
  for (const auto& [eid, ed] : edges_) {
    for (PortId p : {ed.first, ed.second}) {
      auto it = ports_.find(p);
      if (it == ports_.end()) {
        say("edge " + std::to_string(eid.value) + " has missing endpoint");
        continue;
      }
      const auto& list = it->second.edges;
      if (std::count(list.begin(), list.end(), eid) != 1)
        say("edge " + std::to_string(eid.value) + " not listed by endpoint");
    }
    if (!seen.insert(ordered(ed.first, ed.second)).second)
      say("parallel edge " + std::to_string(eid.value));
  }
  if (pair_index_.size() != edges_.size()) say("pair index out of sync");
  return issues;
}

namespace {
void dump_record(std::ostream& os, const Record& r) {
  os << '{';
  bool first = true;
  for (const auto& [k, v] : r) {
    if (!first) os << ',';
    first = false;
    os << k << '=' << v.to_literal();
  }
  os << '}';
}
}  // namespace

std::string PortGraph::canonical_text() const {
  std::ostringstream os;
  for (const auto& [id, n] : nodes_) {
    os << "N" << id.value;
    dump_record(os, n.attrs);
    os << '\n';
    for (PortId p : n.ports) {
      os << "  P" << p.value;
      dump_record(os, ports_.at(p).attrs);
      os << '\n';
    }
  }
  for (const auto& [id, e] : edges_) {
    auto [a, b] = ordered(e.first, e.second);
    os << "E" << id.value << ' ' << a.value << '-' << b.value;
    dump_record(os, e.attrs);
    os << '\n';
  }
  return os.str();
}

std::uint64_t PortGraph::structural_hash() const { return fnv1a64(canonical_text()); }

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace fdpg
