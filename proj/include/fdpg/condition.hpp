#pragma once

// Rule application conditions: a small C-like boolean/arithmetic language
// evaluated against a match. Element attributes are read through the match
// (n(<id>)."attr", e(<id>)."attr" or Name.attr); NotNode("attr" op expr)
// instead asks that no node or port of the whole host graph satisfies the
// comparison.

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fdpg/graph.hpp"
#include "fdpg/report.hpp"
#include "fdpg/rng.hpp"

namespace fdpg::cond {

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// AST
// ---------------------------------------------------------------------------

enum class ArithOp { Add, Sub, Mul, Div, Mod };
enum class CompOp { Eq, Ne, Gt, Lt, Ge, Le };

struct ElementRef {
  enum class Form { Node, Edge, Name };
  Form form = Form::Name;
  std::uint64_t id = 0;  // Node / Edge forms
  std::string name;      // Name form
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Literal {
  AttrValue value;
};
struct Binary {
  ArithOp op;
  ExprPtr lhs, rhs;
};
struct Negate {  // factor-level '!'
  ExprPtr operand;
};
struct AttrRef {
  ElementRef element;
  std::string attr;
};
struct Call {
  enum class Fn { Max, Min, Random };
  Fn fn;
  std::vector<ExprPtr> args;
};

struct Expr {
  std::variant<Literal, Binary, Negate, AttrRef, Call> node;
};

struct Logic;
using LogicPtr = std::shared_ptr<const Logic>;

struct Compare {
  CompOp op;
  ExprPtr lhs, rhs;
};
struct NotNode {
  std::string attr;
  CompOp op;
  ExprPtr rhs;
};
struct LogicNot {
  LogicPtr operand;
};
struct LogicAnd {
  std::vector<LogicPtr> terms;  // at least two
};
struct LogicOr {
  std::vector<LogicPtr> terms;  // at least two
};

struct Logic {
  std::variant<Compare, NotNode, LogicNot, LogicAnd, LogicOr> node;
};

/// Top-level clauses, implicitly conjoined. No clauses means "true".
struct Condition {
  std::vector<LogicPtr> clauses;
};

bool equal(const Expr& a, const Expr& b);
bool equal(const Logic& a, const Logic& b);
bool equal(const Condition& a, const Condition& b);

// ---------------------------------------------------------------------------
// Parsing and printing
// ---------------------------------------------------------------------------

/// Parses `{ logical-expression [';'] }`. Throws SyntaxError.
Condition parse(std::string_view text);

/// Parses a single arithmetic expression (used by rule update assignments).
ExprPtr parse_expression(std::string_view text);

std::string pretty_print(const Condition& c);
std::string pretty_print(const Logic& l);
std::string pretty_print(const Expr& e);

// ---------------------------------------------------------------------------
// Reference validation
// ---------------------------------------------------------------------------

/// The left-hand side a condition is checked against: its graph plus the
/// attributes declared as match variables (present on the host, any value).
struct LhsScope {
  const PortGraph& graph;
  const std::map<std::uint64_t, std::set<std::string>>* variable_attrs = nullptr;
};

/// Node (or, failing that, port) whose viewLabel is `name`, if unique.
std::optional<std::uint64_t> resolve_name(const PortGraph& lhs, std::string_view name);

ValidationReport validate_refs(const Condition& c, const LhsScope& scope);
ValidationReport validate_refs(const Expr& e, const LhsScope& scope);

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

struct EvalContext {
  const PortGraph* host = nullptr;
  /// Left-hand element id -> host element id (nodes, ports and edges).
  const std::map<std::uint64_t, std::uint64_t>* elements = nullptr;
  /// Name variable -> host element id.
  const std::map<std::string, std::uint64_t, std::less<>>* names = nullptr;
  Rng* rng = nullptr;
};

AttrValue evaluate(const Expr& e, const EvalContext& ctx);
bool evaluate(const Logic& l, const EvalContext& ctx);
bool evaluate(const Condition& c, const EvalContext& ctx);

}  // namespace fdpg::cond
