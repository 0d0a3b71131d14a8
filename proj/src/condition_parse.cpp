#include <cctype>
#include <charconv>
#include <optional>

#include "fdpg/condition.hpp"

namespace fdpg::cond {

// ============================================================================
// Lexer
// ============================================================================

namespace {

enum class Tok {
  End, Int, Float, String, Ident,
  LParen, RParen, Comma, Dot, Semi,
  Plus, Minus, Star, Slash, Percent, Bang,
  Eq, Ne, Lt, Gt, Le, Ge, AndAnd, OrOr,
};

struct Token {
  Tok kind;
  std::size_t offset;
  std::string text;  // identifier name or decoded string
  AttrValue number;
};

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto push = [&](Tok k, std::size_t at, std::size_t len) {
    out.push_back({k, at, {}, {}});
    i = at + len;
  };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t at = i;
    auto next_is = [&](char d) { return i + 1 < s.size() && s[i + 1] == d; };

    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      bool is_float = false;
      if (j < s.size() && s[j] == '.' && j + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[j + 1]))) {
        is_float = true;
        ++j;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      }
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
          is_float = true;
          j = k;
          while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        }
      }
      Token t{is_float ? Tok::Float : Tok::Int, at, {}, {}};
      const char* b = s.data() + at;
      const char* e = s.data() + j;
      if (is_float) {
        double d = 0;
        auto r = std::from_chars(b, e, d);
        if (r.ec != std::errc() || r.ptr != e) throw SyntaxError("malformed number", at);
        t.number = d;
      } else {
        std::int64_t v = 0;
        auto r = std::from_chars(b, e, v);
        if (r.ec != std::errc() || r.ptr != e) throw SyntaxError("integer literal out of range", at);
        t.number = v;
      }
      out.push_back(std::move(t));
      i = j;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({Tok::Ident, at, std::string(s.substr(i, j - i)), {}});
      i = j;
      continue;
    }
    if (c == '"') {
      std::string text;
      std::size_t j = i + 1;
      for (;; ++j) {
        if (j >= s.size()) throw SyntaxError("unterminated string", at);
        if (s[j] == '"') break;
        if (s[j] == '\\') {
          if (++j >= s.size()) throw SyntaxError("unterminated string", at);
        }
        text += s[j];
      }
      out.push_back({Tok::String, at, std::move(text), {}});
      i = j + 1;
      continue;
    }
    switch (c) {
      case '(': push(Tok::LParen, at, 1); break;
      case ')': push(Tok::RParen, at, 1); break;
      case ',': push(Tok::Comma, at, 1); break;
      case '.': push(Tok::Dot, at, 1); break;
      case ';': push(Tok::Semi, at, 1); break;
      case '+': push(Tok::Plus, at, 1); break;
      case '-': push(Tok::Minus, at, 1); break;
      case '*': push(Tok::Star, at, 1); break;
      case '/': push(Tok::Slash, at, 1); break;
      case '%': push(Tok::Percent, at, 1); break;
      case '!': next_is('=') ? push(Tok::Ne, at, 2) : push(Tok::Bang, at, 1); break;
      case '<': next_is('=') ? push(Tok::Le, at, 2) : push(Tok::Lt, at, 1); break;
      case '>': next_is('=') ? push(Tok::Ge, at, 2) : push(Tok::Gt, at, 1); break;
      case '=':
        if (!next_is('=')) throw SyntaxError("unexpected '=' (did you mean '==')", at);
        push(Tok::Eq, at, 2);
        break;
      case '&':
        if (!next_is('&')) throw SyntaxError("unexpected '&'", at);
        push(Tok::AndAnd, at, 2);
        break;
      case '|':
        if (!next_is('|')) throw SyntaxError("unexpected '|'", at);
        push(Tok::OrOr, at, 2);
        break;
      default: throw SyntaxError(std::string("unknown token '") + c + "'", at);
    }
  }
  out.push_back({Tok::End, s.size(), {}, {}});
  return out;
}

// ============================================================================
// Parser
// ============================================================================

template <class T>
ExprPtr make_expr(T node) {
  return std::make_shared<const Expr>(Expr{std::move(node)});
}
template <class T>
LogicPtr make_logic(T node) {
  return std::make_shared<const Logic>(Logic{std::move(node)});
}

std::optional<CompOp> comp_op(Tok t) {
  switch (t) {
    case Tok::Eq: return CompOp::Eq;
    case Tok::Ne: return CompOp::Ne;
    case Tok::Gt: return CompOp::Gt;
    case Tok::Lt: return CompOp::Lt;
    case Tok::Ge: return CompOp::Ge;
    case Tok::Le: return CompOp::Le;
    default: return std::nullopt;
  }
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  Condition condition() {
    Condition c;
    while (peek().kind != Tok::End) {
      c.clauses.push_back(logic_expr());
      if (peek().kind == Tok::Semi) ++pos_;
    }
    return c;
  }

  ExprPtr lone_expression() {
    auto e = expression();
    if (peek().kind != Tok::End) fail("unexpected trailing input");
    return e;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(what, peek().offset); }
  void expect(Tok k, const char* what) {
    if (peek().kind != k) fail(std::string("expected ") + what);
    ++pos_;
  }

  // <logical expression> ::= <logical term> { '||' <logical term> }
  LogicPtr logic_expr() {
    std::vector<LogicPtr> terms{logic_term()};
    while (peek().kind == Tok::OrOr) {
      ++pos_;
      terms.push_back(logic_term());
    }
    return terms.size() == 1 ? terms.front() : make_logic(LogicOr{std::move(terms)});
  }

  // <logical term> ::= <logical factor> { '&&' <logical factor> }
  LogicPtr logic_term() {
    std::vector<LogicPtr> terms{logic_factor()};
    while (peek().kind == Tok::AndAnd) {
      ++pos_;
      terms.push_back(logic_factor());
    }
    return terms.size() == 1 ? terms.front() : make_logic(LogicAnd{std::move(terms)});
  }

  // <logical factor> ::= <comparison> | '!' <logical factor> | '(' <logical expression> ')'
  // A leading '!' or '(' may also open a comparison operand, so the
  // comparison reading is tried first and abandoned on a syntax error.
  LogicPtr logic_factor() {
    const std::size_t save = pos_;
    std::optional<SyntaxError> first;
    try {
      return comparison();
    } catch (const SyntaxError& e) {
      first = e;
      pos_ = save;
    }
    if (peek().kind == Tok::Bang) {
      ++pos_;
      return make_logic(LogicNot{logic_factor()});
    }
    if (peek().kind == Tok::LParen) {
      ++pos_;
      try {
        auto inner = logic_expr();
        expect(Tok::RParen, "')'");
        return inner;
      } catch (const SyntaxError& e) {
        if (e.offset() > first->offset()) throw;
      }
    }
    throw *first;
  }

  // <comparison> ::= <expression> <op> <expression> | 'NotNode(' attr <op> <expression> ')'
  LogicPtr comparison() {
    if (peek().kind == Tok::Ident && peek().text == "NotNode" && peek(1).kind == Tok::LParen) {
      pos_ += 2;
      if (peek().kind != Tok::String && peek().kind != Tok::Ident) fail("expected attribute name in NotNode");
      std::string attr = peek().text;
      ++pos_;
      auto op = comp_op(peek().kind);
      if (!op) fail("expected comparison operator in NotNode");
      ++pos_;
      auto rhs = expression();
      expect(Tok::RParen, "')' closing NotNode");
      return make_logic(NotNode{std::move(attr), *op, std::move(rhs)});
    }
    auto lhs = expression();
    auto op = comp_op(peek().kind);
    if (!op) fail("expected comparison operator");
    ++pos_;
    auto rhs = expression();
    return make_logic(Compare{*op, std::move(lhs), std::move(rhs)});
  }

  // <expression> ::= <term> { ('+' | '-') <term> }
  ExprPtr expression() {
    auto e = term();
    for (;;) {
      Tok k = peek().kind;
      if (k != Tok::Plus && k != Tok::Minus) return e;
      ++pos_;
      e = make_expr(Binary{k == Tok::Plus ? ArithOp::Add : ArithOp::Sub, e, term()});
    }
  }

  // <term> ::= <factor> { ('*' | '/' | '%') <factor> }
  ExprPtr term() {
    auto e = factor();
    for (;;) {
      Tok k = peek().kind;
      ArithOp op;
      if (k == Tok::Star) op = ArithOp::Mul;
      else if (k == Tok::Slash) op = ArithOp::Div;
      else if (k == Tok::Percent) op = ArithOp::Mod;
      else return e;
      ++pos_;
      e = make_expr(Binary{op, e, factor()});
    }
  }

  std::string attribute_name(bool allow_ident) {
    if (peek().kind == Tok::String || (allow_ident && peek().kind == Tok::Ident)) {
      std::string name = peek().text;
      ++pos_;
      return name;
    }
    fail("expected attribute name");
  }

  ExprPtr factor() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Int:
      case Tok::Float: {
        ++pos_;
        return make_expr(Literal{t.number});
      }
      case Tok::String: {
        ++pos_;
        return make_expr(Literal{AttrValue(t.text)});
      }
      case Tok::LParen: {
        ++pos_;
        auto e = expression();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Bang: {
        ++pos_;
        return make_expr(Negate{factor()});
      }
      case Tok::Ident: break;
      default: fail("expected a value");
    }

    const std::string name = t.text;
    const Tok after = peek(1).kind;
    if (after == Tok::Dot) {
      pos_ += 2;
      return make_expr(AttrRef{{ElementRef::Form::Name, 0, name}, attribute_name(true)});
    }
    if (after != Tok::LParen) fail("unknown identifier '" + name + "'");

    if (name == "n" || name == "e") {
      pos_ += 2;
      if (peek().kind != Tok::Int) fail("expected element id");
      auto id = peek().number.as_int();
      if (id < 0) fail("element id must be non-negative");
      ++pos_;
      expect(Tok::RParen, "')'");
      expect(Tok::Dot, "'.'");
      auto form = name == "n" ? ElementRef::Form::Node : ElementRef::Form::Edge;
      return make_expr(AttrRef{{form, static_cast<std::uint64_t>(id), {}}, attribute_name(true)});
    }
    if (name == "max" || name == "min") {
      pos_ += 2;
      auto a = expression();
      expect(Tok::Comma, "','");
      auto b = expression();
      expect(Tok::RParen, "')'");
      return make_expr(Call{name == "max" ? Call::Fn::Max : Call::Fn::Min, {a, b}});
    }
    if (name == "random") {
      pos_ += 2;
      auto a = factor();
      expect(Tok::RParen, "')'");
      return make_expr(Call{Call::Fn::Random, {a}});
    }
    fail("unknown function '" + name + "'");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Condition parse(std::string_view text) { return Parser(text).condition(); }

ExprPtr parse_expression(std::string_view text) { return Parser(text).lone_expression(); }

// ============================================================================
// Printer
// ============================================================================

namespace {

const char* op_text(ArithOp op) {
  switch (op) {
    case ArithOp::Add: return "+";
    case ArithOp::Sub: return "-";
    case ArithOp::Mul: return "*";
    case ArithOp::Div: return "/";
    case ArithOp::Mod: return "%";
  }
  return "?";
}

const char* op_text(CompOp op) {
  switch (op) {
    case CompOp::Eq: return "==";
    case CompOp::Ne: return "!=";
    case CompOp::Gt: return ">";
    case CompOp::Lt: return "<";
    case CompOp::Ge: return ">=";
    case CompOp::Le: return "<=";
  }
  return "?";
}

int precedence(const Expr& e) {
  if (auto* b = std::get_if<Binary>(&e.node))
    return (b->op == ArithOp::Add || b->op == ArithOp::Sub) ? 1 : 2;
  return 3;
}

bool plain_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

std::string quoted(const std::string& s) { return AttrValue(s).to_literal(); }

std::string print_ref(const AttrRef& r) {
  switch (r.element.form) {
    case ElementRef::Form::Node: return "n(" + std::to_string(r.element.id) + ")." + quoted(r.attr);
    case ElementRef::Form::Edge: return "e(" + std::to_string(r.element.id) + ")." + quoted(r.attr);
    case ElementRef::Form::Name:
      return r.element.name + "." + (plain_identifier(r.attr) ? r.attr : quoted(r.attr));
  }
  return {};
}

}  // namespace

std::string pretty_print(const Expr& e) {
  return std::visit(
      [&](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Literal>) {
          return n.value.to_literal();
        } else if constexpr (std::is_same_v<T, Binary>) {
          const int p = precedence(e);
          std::string l = pretty_print(*n.lhs), r = pretty_print(*n.rhs);
          if (precedence(*n.lhs) < p) l = "(" + l + ")";
          if (precedence(*n.rhs) <= p) r = "(" + r + ")";
          return l + " " + op_text(n.op) + " " + r;
        } else if constexpr (std::is_same_v<T, Negate>) {
          std::string inner = pretty_print(*n.operand);
          if (precedence(*n.operand) < 3) inner = "(" + inner + ")";
          return "!" + inner;
        } else if constexpr (std::is_same_v<T, AttrRef>) {
          return print_ref(n);
        } else {
          switch (n.fn) {
            case Call::Fn::Max: return "max(" + pretty_print(*n.args[0]) + ", " + pretty_print(*n.args[1]) + ")";
            case Call::Fn::Min: return "min(" + pretty_print(*n.args[0]) + ", " + pretty_print(*n.args[1]) + ")";
            case Call::Fn::Random: {
              std::string inner = pretty_print(*n.args[0]);
              if (precedence(*n.args[0]) < 3) inner = "(" + inner + ")";
              return "random(" + inner + ")";
            }
          }
          return {};
        }
      },
      e.node);
}

std::string pretty_print(const Logic& l) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Compare>) {
          return pretty_print(*n.lhs) + " " + op_text(n.op) + " " + pretty_print(*n.rhs);
        } else if constexpr (std::is_same_v<T, NotNode>) {
          return "NotNode(" + quoted(n.attr) + " " + op_text(n.op) + " " + pretty_print(*n.rhs) + ")";
        } else if constexpr (std::is_same_v<T, LogicNot>) {
          if (std::holds_alternative<LogicNot>(n.operand->node)) return "!" + pretty_print(*n.operand);
          return "!(" + pretty_print(*n.operand) + ")";
        } else {
          constexpr bool is_and = std::is_same_v<T, LogicAnd>;
          std::string out;
          for (const auto& t : n.terms) {
            if (!out.empty()) out += is_and ? " && " : " || ";
            bool wrap = std::holds_alternative<LogicOr>(t->node) || (is_and && std::holds_alternative<LogicAnd>(t->node));
            out += wrap ? "(" + pretty_print(*t) + ")" : pretty_print(*t);
          }
          return out;
        }
      },
      l.node);
}

std::string pretty_print(const Condition& c) {
  std::string out;
  for (const auto& cl : c.clauses) {
    if (!out.empty()) out += "; ";
    out += pretty_print(*cl);
  }
  return out;
}

// ============================================================================
// Structural equality
// ============================================================================

bool equal(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, Literal>) {
          return x.value.identical(y.value);
        } else if constexpr (std::is_same_v<T, Binary>) {
          return x.op == y.op && equal(*x.lhs, *y.lhs) && equal(*x.rhs, *y.rhs);
        } else if constexpr (std::is_same_v<T, Negate>) {
          return equal(*x.operand, *y.operand);
        } else if constexpr (std::is_same_v<T, AttrRef>) {
          return x.attr == y.attr && x.element.form == y.element.form && x.element.id == y.element.id &&
                 x.element.name == y.element.name;
        } else {
          if (x.fn != y.fn || x.args.size() != y.args.size()) return false;
          for (std::size_t i = 0; i < x.args.size(); ++i)
            if (!equal(*x.args[i], *y.args[i])) return false;
          return true;
        }
      },
      a.node);
}

bool equal(const Logic& a, const Logic& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, Compare>) {
          return x.op == y.op && equal(*x.lhs, *y.lhs) && equal(*x.rhs, *y.rhs);
        } else if constexpr (std::is_same_v<T, NotNode>) {
          return x.attr == y.attr && x.op == y.op && equal(*x.rhs, *y.rhs);
        } else if constexpr (std::is_same_v<T, LogicNot>) {
          return equal(*x.operand, *y.operand);
        } else {
          if (x.terms.size() != y.terms.size()) return false;
          for (std::size_t i = 0; i < x.terms.size(); ++i)
            if (!equal(*x.terms[i], *y.terms[i])) return false;
          return true;
        }
      },
      a.node);
}

bool equal(const Condition& a, const Condition& b) {
  if (a.clauses.size() != b.clauses.size()) return false;
  for (std::size_t i = 0; i < a.clauses.size(); ++i)
    if (!equal(*a.clauses[i], *b.clauses[i])) return false;
  return true;
}

}  // namespace fdpg::cond
