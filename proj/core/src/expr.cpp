#include "dphase/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <vector>

namespace dphase {

namespace {

enum class Fn { Sin, Cos, Exp, Abs, Sqrt, Min, Max };

const char* fn_name(Fn f) {
  switch (f) {
    case Fn::Sin: return "sin";
    case Fn::Cos: return "cos";
    case Fn::Exp: return "exp";
    case Fn::Abs: return "abs";
    case Fn::Sqrt: return "sqrt";
    case Fn::Min: return "min";
    case Fn::Max: return "max";
  }
  return "?";
}

int fn_arity(Fn f) { return (f == Fn::Min || f == Fn::Max) ? 2 : 1; }

}  // namespace

struct Expr::Node {
  enum class Kind { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Call };

  Kind kind;
  double number = 0;          // Number
  char var = 0;               // Var: 'x', 'y' or 't'
  Fn fn = Fn::Sin;            // Call
  std::shared_ptr<const Node> a, b;

  static std::shared_ptr<const Node> number_node(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Number;
    n->number = v;
    return n;
  }
  static std::shared_ptr<const Node> var_node(char c) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Var;
    n->var = c;
    return n;
  }
  static std::shared_ptr<const Node> unary(Kind k, std::shared_ptr<const Node> a) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->a = std::move(a);
    return n;
  }
  static std::shared_ptr<const Node> binary(Kind k, std::shared_ptr<const Node> a,
                                            std::shared_ptr<const Node> b) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }
  static std::shared_ptr<const Node> call(Fn f, std::shared_ptr<const Node> a,
                                          std::shared_ptr<const Node> b = nullptr) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Call;
    n->fn = f;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }
};

namespace {

using Node = Expr::Node;
using Kind = Expr::Node::Kind;
using NodePtr = std::shared_ptr<const Node>;

// ---------------------------------------------------------------------------
// Parser: recursive descent over the raw character stream.
//   expr    := term  (('+'|'-') term)*
//   term    := factor (('*'|'/') factor)*
//   factor  := unary ('^' factor)?          -- right-associative
//   unary   := '-' unary | primary
//   primary := number | 'x'|'y'|'t' | fn '(' expr (',' expr)? ')' | '(' expr ')'
// ---------------------------------------------------------------------------
class Parser {
public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr run() {
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ != src_.size())
      fail("end of input");
    return e;
  }

private:
  std::string_view src_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& expected) {
    throw ParseError(pos_, expected,
                     "syntax error at offset " + std::to_string(pos_) + ": expected " + expected);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool peek_char(char c) {
    skip_ws();
    return pos_ < src_.size() && src_[pos_] == c;
  }

  bool accept(char c) {
    if (peek_char(c)) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c, const std::string& what) {
    if (!accept(c)) fail(what);
  }

  NodePtr parse_expr() {
    NodePtr left = parse_term();
    for (;;) {
      if (accept('+'))
        left = Node::binary(Kind::Add, left, parse_term());
      else if (accept('-'))
        left = Node::binary(Kind::Sub, left, parse_term());
      else
        return left;
    }
  }

  NodePtr parse_term() {
    NodePtr left = parse_factor();
    for (;;) {
      if (accept('*'))
        left = Node::binary(Kind::Mul, left, parse_factor());
      else if (accept('/'))
        left = Node::binary(Kind::Div, left, parse_factor());
      else
        return left;
    }
  }

  NodePtr parse_factor() {
    NodePtr base = parse_unary();
    if (accept('^'))
      return Node::binary(Kind::Pow, base, parse_factor());
    return base;
  }

  NodePtr parse_unary() {
    if (accept('-'))
      return Node::unary(Kind::Neg, parse_unary());
    return parse_primary();
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= src_.size())
      fail("a literal, variable, function call, or '('");

    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_expr();
      expect(')', "')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      return parse_identifier();
    fail("a literal, variable, function call, or '('");
  }

  NodePtr parse_number() {
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
      ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t mark = pos_++;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      } else {
        pos_ = mark;  // 'e' was not an exponent
      }
    }
    double value = 0;
    auto res = std::from_chars(src_.data() + start, src_.data() + pos_, value);
    if (res.ec != std::errc() || res.ptr != src_.data() + pos_) {
      pos_ = start;
      fail("a numeric literal");
    }
    return Node::number_node(value);
  }

  NodePtr parse_identifier() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                  src_[pos_] == '_'))
      ++pos_;
    std::string_view name = src_.substr(start, pos_ - start);

    if (name == "x" || name == "y" || name == "t")
      return Node::var_node(name[0]);

    static constexpr std::array<std::pair<std::string_view, Fn>, 7> fns{{
        {"sin", Fn::Sin}, {"cos", Fn::Cos}, {"exp", Fn::Exp}, {"abs", Fn::Abs},
        {"sqrt", Fn::Sqrt}, {"min", Fn::Min}, {"max", Fn::Max},
    }};
    for (const auto& [fname, fv] : fns) {
      if (name == fname) {
        expect('(', "'(' after function name");
        NodePtr a = parse_expr();
        NodePtr b;
        if (fn_arity(fv) == 2) {
          expect(',', "',' between function arguments");
          b = parse_expr();
        }
        expect(')', "')'");
        return Node::call(fv, a, b);
      }
    }
    pos_ = start;
    fail("a known variable (x, y, t) or function name");
  }
};

// ---------------------------------------------------------------------------
// Printer with minimal parentheses, chosen so that reparsing reproduces the
// tree exactly.  Precedence: +- (1) < */ (2) < ^ (3) < unary - (4) < atom (5).
// ---------------------------------------------------------------------------
int precedence(const Node& n) {
  switch (n.kind) {
    case Kind::Add:
    case Kind::Sub: return 1;
    case Kind::Mul:
    case Kind::Div: return 2;
    case Kind::Pow: return 3;
    case Kind::Neg: return 4;
    default: return 5;
  }
}

void print_number(std::string& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

void print_node(std::string& out, const Node& n);

void print_child(std::string& out, const Node& child, bool parens) {
  if (parens) out += '(';
  print_node(out, child);
  if (parens) out += ')';
}

void print_node(std::string& out, const Node& n) {
  switch (n.kind) {
    case Kind::Number:
      print_number(out, n.number);
      return;
    case Kind::Var:
      out += n.var;
      return;
    case Kind::Neg:
      out += '-';
      // Anything below unary-minus precedence reparses differently without
      // parentheses (e.g. -(x^2) vs (-x)^2).
      print_child(out, *n.a, precedence(*n.a) < 4);
      return;
    case Kind::Add:
    case Kind::Sub:
    case Kind::Mul:
    case Kind::Div: {
      int p = precedence(n);
      char op = n.kind == Kind::Add ? '+' : n.kind == Kind::Sub ? '-'
                : n.kind == Kind::Mul ? '*' : '/';
      print_child(out, *n.a, precedence(*n.a) < p);
      out += op;
      bool strict = n.kind == Kind::Sub || n.kind == Kind::Div;
      print_child(out, *n.b, precedence(*n.b) < p + (strict ? 1 : 0));
      return;
    }
    case Kind::Pow:
      // Right-associative: parenthesize a left child at pow precedence.
      print_child(out, *n.a, precedence(*n.a) <= 3);
      out += '^';
      print_child(out, *n.b, precedence(*n.b) < 3);
      return;
    case Kind::Call:
      out += fn_name(n.fn);
      out += '(';
      print_node(out, *n.a);
      if (n.b) {
        out += ',';
        print_node(out, *n.b);
      }
      out += ')';
      return;
  }
}

std::string render(const Node& n) {
  std::string s;
  print_node(s, n);
  return s;
}

[[noreturn]] void eval_fail(const Node& n, const char* what) {
  throw EvalError(render(n), std::string(what) + " in '" + render(n) + "'");
}

double eval_node(const Node& n, double x, double y, double t, bool has_t) {
  switch (n.kind) {
    case Kind::Number:
      return n.number;
    case Kind::Var:
      if (n.var == 'x') return x;
      if (n.var == 'y') return y;
      if (!has_t) eval_fail(n, "variable t is not available in a spatial field");
      return t;
    case Kind::Neg:
      return -eval_node(*n.a, x, y, t, has_t);
    case Kind::Add:
      return eval_node(*n.a, x, y, t, has_t) + eval_node(*n.b, x, y, t, has_t);
    case Kind::Sub:
      return eval_node(*n.a, x, y, t, has_t) - eval_node(*n.b, x, y, t, has_t);
    case Kind::Mul:
      return eval_node(*n.a, x, y, t, has_t) * eval_node(*n.b, x, y, t, has_t);
    case Kind::Div: {
      double num = eval_node(*n.a, x, y, t, has_t);
      double den = eval_node(*n.b, x, y, t, has_t);
      if (den == 0.0) eval_fail(n, "division by zero");
      double v = num / den;
      if (!std::isfinite(v)) eval_fail(n, "non-finite result");
      return v;
    }
    case Kind::Pow: {
      double base = eval_node(*n.a, x, y, t, has_t);
      double expo = eval_node(*n.b, x, y, t, has_t);
      double v = std::pow(base, expo);
      if (!std::isfinite(v)) eval_fail(n, "non-finite power");
      return v;
    }
    case Kind::Call: {
      double a = eval_node(*n.a, x, y, t, has_t);
      switch (n.fn) {
        case Fn::Sin: return std::sin(a);
        case Fn::Cos: return std::cos(a);
        case Fn::Exp: {
          double v = std::exp(a);
          if (!std::isfinite(v)) eval_fail(n, "non-finite exp");
          return v;
        }
        case Fn::Abs: return std::fabs(a);
        case Fn::Sqrt:
          if (a < 0) eval_fail(n, "sqrt of a negative value");
          return std::sqrt(a);
        case Fn::Min: return std::fmin(a, eval_node(*n.b, x, y, t, has_t));
        case Fn::Max: return std::fmax(a, eval_node(*n.b, x, y, t, has_t));
      }
      eval_fail(n, "unknown function");
    }
  }
  eval_fail(n, "corrupt expression node");
}

bool node_references(const Node& n, char var) {
  if (n.kind == Kind::Var) return n.var == var;
  if (n.a && node_references(*n.a, var)) return true;
  if (n.b && node_references(*n.b, var)) return true;
  return false;
}

bool node_has_var(const Node& n) {
  if (n.kind == Kind::Var) return true;
  if (n.a && node_has_var(*n.a)) return true;
  if (n.b && node_has_var(*n.b)) return true;
  return false;
}

bool node_equal(const Node* a, const Node* b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Kind::Number:
      // Structural identity: bit-equal literals.
      return a->number == b->number ||
             (std::isnan(a->number) && std::isnan(b->number));
    case Kind::Var:
      return a->var == b->var;
    case Kind::Call:
      if (a->fn != b->fn) return false;
      [[fallthrough]];
    default:
      return node_equal(a->a.get(), b->a.get()) && node_equal(a->b.get(), b->b.get());
  }
}

}  // namespace

Expr Expr::parse(std::string_view src) {
  if (src.empty())
    throw ParseError(0, "a nonempty expression", "syntax error at offset 0: empty input");
  Parser p(src);
  return Expr(p.run());
}

double Expr::eval(double x, double y) const {
  if (!root_) throw EvalError("", "evaluating an empty expression");
  return eval_node(*root_, x, y, 0.0, /*has_t=*/false);
}

double Expr::eval(double x, double y, double t) const {
  if (!root_) throw EvalError("", "evaluating an empty expression");
  return eval_node(*root_, x, y, t, /*has_t=*/true);
}

std::string Expr::to_string() const {
  if (!root_) return "";
  return render(*root_);
}

bool Expr::references_t() const { return root_ && node_references(*root_, 't'); }

bool Expr::is_constant() const { return root_ && !node_has_var(*root_); }

bool Expr::same_structure(const Expr& other) const {
  return node_equal(root_.get(), other.root_.get());
}

}  // namespace dphase
