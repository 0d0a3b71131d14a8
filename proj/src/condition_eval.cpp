#include <cmath>
#include <limits>

#include "fdpg/condition.hpp"

namespace fdpg::cond {

// ============================================================================
// Name resolution and reference validation
// ============================================================================

std::optional<std::uint64_t> resolve_name(const PortGraph& lhs, std::string_view name) {
  auto labelled = [&](const Record& r) {
    auto it = r.find("viewLabel");
    return it != r.end() && it->second.tag() == AttrTag::Text && it->second.as_text() == name;
  };
  std::optional<std::uint64_t> hit;
  int count = 0;
  for (const auto& [id, n] : lhs.nodes())
    if (labelled(n.attrs)) {
      hit = id.value;
      ++count;
    }
  if (count == 0)
    for (const auto& [id, p] : lhs.ports())
      if (labelled(p.attrs)) {
        hit = id.value;
        ++count;
      }
  if (count != 1) return std::nullopt;
  return hit;
}

namespace {

class RefChecker {
 public:
  explicit RefChecker(const LhsScope& scope) : scope_(scope) {}

  void expr(const Expr& e) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Binary>) {
            expr(*n.lhs);
            expr(*n.rhs);
          } else if constexpr (std::is_same_v<T, Negate>) {
            expr(*n.operand);
          } else if constexpr (std::is_same_v<T, AttrRef>) {
            ref(n);
          } else if constexpr (std::is_same_v<T, Call>) {
            for (const auto& a : n.args) expr(*a);
          }
        },
        e.node);
  }

  void logic(const Logic& l) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Compare>) {
            expr(*n.lhs);
            expr(*n.rhs);
          } else if constexpr (std::is_same_v<T, NotNode>) {
            // The attribute name is looked up on host nodes at evaluation time.
            expr(*n.rhs);
          } else if constexpr (std::is_same_v<T, LogicNot>) {
            logic(*n.operand);
          } else {
            for (const auto& t : n.terms) logic(*t);
          }
        },
        l.node);
  }

  ValidationReport report;

 private:
  void ref(const AttrRef& r) {
    const PortGraph& g = scope_.graph;
    std::optional<std::uint64_t> id;
    std::string shown;
    switch (r.element.form) {
      case ElementRef::Form::Node:
        shown = "n(" + std::to_string(r.element.id) + ")";
        if (auto k = g.kind_of(r.element.id); k == ElementKind::Node || k == ElementKind::Port) id = r.element.id;
        break;
      case ElementRef::Form::Edge:
        shown = "e(" + std::to_string(r.element.id) + ")";
        if (g.kind_of(r.element.id) == ElementKind::Edge) id = r.element.id;
        break;
      case ElementRef::Form::Name:
        shown = r.element.name;
        id = resolve_name(g, r.element.name);
        break;
    }
    if (!id) {
      report.add("unresolved-ref", shown + " does not name a unique left-hand element");
      return;
    }
    const Record* rec = g.find_attrs(*id);
    bool declared = rec && rec->count(r.attr);
    if (!declared && scope_.variable_attrs) {
      auto it = scope_.variable_attrs->find(*id);
      declared = it != scope_.variable_attrs->end() && it->second.count(r.attr);
    }
    if (!declared) report.add("unknown-attribute", shown + " has no attribute '" + r.attr + "'");
  }

  const LhsScope& scope_;
};

}  // namespace

ValidationReport validate_refs(const Condition& c, const LhsScope& scope) {
  RefChecker chk(scope);
  for (const auto& cl : c.clauses) chk.logic(*cl);
  return chk.report;
}

ValidationReport validate_refs(const Expr& e, const LhsScope& scope) {
  RefChecker chk(scope);
  chk.expr(e);
  return chk.report;
}

// ============================================================================
// Evaluation
// ============================================================================

namespace {

AttrValue arithmetic(ArithOp op, const AttrValue& a, const AttrValue& b) {
  if (!a.is_number() || !b.is_number())
    throw EvalError("arithmetic on " + std::string(tag_name(a.tag())) + " and " + std::string(tag_name(b.tag())));

  if (a.tag() == AttrTag::Integer && b.tag() == AttrTag::Integer) {
    const std::int64_t x = a.as_int(), y = b.as_int();
    std::int64_t r = 0;
    bool overflow = false;
    switch (op) {
      case ArithOp::Add: overflow = __builtin_add_overflow(x, y, &r); break;
      case ArithOp::Sub: overflow = __builtin_sub_overflow(x, y, &r); break;
      case ArithOp::Mul: overflow = __builtin_mul_overflow(x, y, &r); break;
      case ArithOp::Div:
      case ArithOp::Mod:
        if (y == 0) throw EvalError(op == ArithOp::Div ? "division by zero" : "modulo by zero");
        if (x == std::numeric_limits<std::int64_t>::min() && y == -1) overflow = true;
        else r = op == ArithOp::Div ? x / y : x % y;
        break;
    }
    if (overflow) throw EvalError("integer overflow");
    return r;
  }

  if (op == ArithOp::Mod) throw EvalError("modulo requires integer operands");
  const double x = a.as_float(), y = b.as_float();
  switch (op) {
    case ArithOp::Add: return x + y;
    case ArithOp::Sub: return x - y;
    case ArithOp::Mul: return x * y;
    case ArithOp::Div:
      if (y == 0.0) throw EvalError("division by zero");
      return x / y;
    case ArithOp::Mod: break;
  }
  return 0.0;
}

bool compare(CompOp op, const AttrValue& a, const AttrValue& b) {
  if (a.tag() == AttrTag::Boolean && b.tag() == AttrTag::Boolean && op != CompOp::Eq && op != CompOp::Ne)
    throw EvalError("booleans only support == and !=");
  std::partial_ordering ord = std::partial_ordering::unordered;
  try {
    ord = a.compare(b);
  } catch (const TypeMismatch& e) {
    throw EvalError(e.what());
  }
  switch (op) {
    case CompOp::Eq: return ord == 0;
    case CompOp::Ne: return ord != 0;
    case CompOp::Gt: return ord > 0;
    case CompOp::Lt: return ord < 0;
    case CompOp::Ge: return ord >= 0;
    case CompOp::Le: return ord <= 0;
  }
  return false;
}

std::uint64_t host_element(const ElementRef& r, const EvalContext& ctx) {
  if (r.form == ElementRef::Form::Name) {
    if (ctx.names)
      if (auto it = ctx.names->find(r.name); it != ctx.names->end()) return it->second;
    throw EvalError("name variable " + r.name + " is not bound by the match");
  }
  if (ctx.elements)
    if (auto it = ctx.elements->find(r.id); it != ctx.elements->end()) return it->second;
  throw EvalError("element " + std::to_string(r.id) + " is not bound by the match");
}

}  // namespace

AttrValue evaluate(const Expr& e, const EvalContext& ctx) {
  return std::visit(
      [&](const auto& n) -> AttrValue {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Literal>) {
          return n.value;
        } else if constexpr (std::is_same_v<T, Binary>) {
          return arithmetic(n.op, evaluate(*n.lhs, ctx), evaluate(*n.rhs, ctx));
        } else if constexpr (std::is_same_v<T, Negate>) {
          AttrValue v = evaluate(*n.operand, ctx);
          if (v.tag() != AttrTag::Boolean) throw EvalError("'!' applied to " + std::string(tag_name(v.tag())));
          return !v.as_bool();
        } else if constexpr (std::is_same_v<T, AttrRef>) {
          if (!ctx.host) throw EvalError("no host graph to read " + n.attr + " from");
          const Record* rec = ctx.host->find_attrs(host_element(n.element, ctx));
          if (!rec) throw EvalError("matched element vanished from host");
          auto it = rec->find(n.attr);
          if (it == rec->end()) throw EvalError("matched element has no attribute '" + n.attr + "'");
          return it->second;
        } else {
          if (n.fn == Call::Fn::Random) {
            AttrValue bound = evaluate(*n.args[0], ctx);
            if (bound.tag() != AttrTag::Integer || bound.as_int() <= 0)
              throw EvalError("random() needs a positive integer bound");
            if (!ctx.rng) throw EvalError("random() evaluated without a generator");
            return static_cast<std::int64_t>(ctx.rng->uniform_below(static_cast<std::uint64_t>(bound.as_int())));
          }
          AttrValue a = evaluate(*n.args[0], ctx), b = evaluate(*n.args[1], ctx);
          if (!a.is_number() || !b.is_number()) throw EvalError("max/min need numeric arguments");
          const bool take_a = n.fn == Call::Fn::Max ? a.compare(b) >= 0 : a.compare(b) <= 0;
          if (a.tag() == AttrTag::Integer && b.tag() == AttrTag::Integer) return take_a ? a : b;
          return take_a ? a.as_float() : b.as_float();
        }
      },
      e.node);
}

bool evaluate(const Logic& l, const EvalContext& ctx) {
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Compare>) {
          return compare(n.op, evaluate(*n.lhs, ctx), evaluate(*n.rhs, ctx));
        } else if constexpr (std::is_same_v<T, NotNode>) {
          if (!ctx.host) throw EvalError("NotNode evaluated without a host graph");
          const AttrValue target = evaluate(*n.rhs, ctx);
          auto witnesses = [&](const Record& r) {
            auto it = r.find(n.attr);
            return it != r.end() && compare(n.op, it->second, target);
          };
          // Ports are scanned too: they are addressed like nodes.
          for (const auto& [id, node] : ctx.host->nodes())
            if (witnesses(node.attrs)) return false;
          for (const auto& [id, port] : ctx.host->ports())
            if (witnesses(port.attrs)) return false;
          return true;
        } else if constexpr (std::is_same_v<T, LogicNot>) {
          return !evaluate(*n.operand, ctx);
        } else if constexpr (std::is_same_v<T, LogicAnd>) {
          for (const auto& t : n.terms)
            if (!evaluate(*t, ctx)) return false;
          return true;
        } else {
          for (const auto& t : n.terms)
            if (evaluate(*t, ctx)) return true;
          return false;
        }
      },
      l.node);
}

bool evaluate(const Condition& c, const EvalContext& ctx) {
  for (const auto& cl : c.clauses)
    if (!evaluate(*cl, ctx)) return false;
  return true;
}

}  // namespace fdpg::cond
