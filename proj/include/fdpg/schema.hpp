#pragma once

#include <compare>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdpg {

/// A functional dependency in canonical form: lhs -> rhs with a single
/// right-hand attribute that does not occur on the left.
struct FD {
  std::set<std::string> lhs;
  std::string rhs;

  friend auto operator<=>(const FD&, const FD&) = default;
};

/// Renders "A,B -> C" (the schema-file body form).
std::string to_string(const FD& fd);

struct Schema {
  std::vector<std::string> attributes;
  std::vector<FD> fds;
};

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CyclicSchemaError : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

/// Problems that make a schema unusable: unknown names, empty lhs,
/// rhs ∈ lhs, duplicate attributes or FDs. Empty result means valid.
std::vector<std::string> schema_problems(const Schema& s);

/// A cycle in the attribute dependency graph (a -> b whenever a is on the
/// left of an FD whose right side is b), listed in traversal order.
struct CycleWitness {
  std::vector<std::string> attributes;
};

std::optional<CycleWitness> detect_cycles(const Schema& s);

}  // namespace fdpg
