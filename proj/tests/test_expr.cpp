#include "dphase/expr.hpp"
#include "dphase/field.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <thread>

using namespace dphase;

namespace {

// ---------------------------------------------------------------------------
// Reference side: an independent tiny AST with its own renderer and
// evaluator.  The renderer emits text following the documented precedence
// (^ tightest and right-associative, unary minus tighter than a power
// base); if the parser disagreed about precedence, the evaluations would
// part ways.
// ---------------------------------------------------------------------------
struct RefNode {
  enum Kind { Num, X, Y, Add, Sub, Mul, Div, Pow, Neg } kind;
  double value = 0;
  std::unique_ptr<RefNode> a, b;
};

using RefPtr = std::unique_ptr<RefNode>;

RefPtr ref_leaf(RefNode::Kind k, double v = 0) {
  auto n = std::make_unique<RefNode>();
  n->kind = k;
  n->value = v;
  return n;
}

RefPtr ref_node(RefNode::Kind k, RefPtr a, RefPtr b = nullptr) {
  auto n = std::make_unique<RefNode>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

int ref_prec(const RefNode& n) {
  switch (n.kind) {
    case RefNode::Add:
    case RefNode::Sub: return 1;
    case RefNode::Mul:
    case RefNode::Div: return 2;
    case RefNode::Pow: return 3;
    case RefNode::Neg: return 4;
    default: return 5;
  }
}

void ref_render(const RefNode& n, std::string& out) {
  auto child = [&](const RefNode& c, bool parens) {
    if (parens) out += '(';
    ref_render(c, out);
    if (parens) out += ')';
  };
  switch (n.kind) {
    case RefNode::Num: {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", n.value);
      out += buf;
      return;
    }
    case RefNode::X: out += 'x'; return;
    case RefNode::Y: out += 'y'; return;
    case RefNode::Neg:
      out += '-';
      child(*n.a, ref_prec(*n.a) < 4);
      return;
    case RefNode::Pow:
      child(*n.a, ref_prec(*n.a) <= 3);
      out += '^';
      child(*n.b, ref_prec(*n.b) < 3);
      return;
    default: {
      int p = ref_prec(n);
      char op = n.kind == RefNode::Add ? '+' : n.kind == RefNode::Sub ? '-'
                : n.kind == RefNode::Mul ? '*' : '/';
      bool strict_rhs = n.kind == RefNode::Sub || n.kind == RefNode::Div;
      child(*n.a, ref_prec(*n.a) < p);
      out += op;
      child(*n.b, ref_prec(*n.b) < p + (strict_rhs ? 1 : 0));
      return;
    }
  }
}

struct RefDomainError {};

double ref_eval(const RefNode& n, double x, double y) {
  switch (n.kind) {
    case RefNode::Num: return n.value;
    case RefNode::X: return x;
    case RefNode::Y: return y;
    case RefNode::Neg: return -ref_eval(*n.a, x, y);
    case RefNode::Add: return ref_eval(*n.a, x, y) + ref_eval(*n.b, x, y);
    case RefNode::Sub: return ref_eval(*n.a, x, y) - ref_eval(*n.b, x, y);
    case RefNode::Mul: return ref_eval(*n.a, x, y) * ref_eval(*n.b, x, y);
    case RefNode::Div: {
      double den = ref_eval(*n.b, x, y);
      if (std::fabs(den) < 1e-6) throw RefDomainError{};
      return ref_eval(*n.a, x, y) / den;
    }
    case RefNode::Pow: {
      double v = std::pow(ref_eval(*n.a, x, y), ref_eval(*n.b, x, y));
      if (!std::isfinite(v)) throw RefDomainError{};
      return v;
    }
  }
  return 0;
}

RefPtr random_tree(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> leaf(0, 2);
  std::uniform_real_distribution<double> num(0.25, 3.0);
  if (depth <= 0) {
    switch (leaf(rng)) {
      case 0: return ref_leaf(RefNode::X);
      case 1: return ref_leaf(RefNode::Y);
      default: return ref_leaf(RefNode::Num, num(rng));
    }
  }
  std::uniform_int_distribution<int> pick(0, 6);
  switch (pick(rng)) {
    case 0: return ref_node(RefNode::Add, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 1: return ref_node(RefNode::Sub, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 2: return ref_node(RefNode::Mul, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 3: return ref_node(RefNode::Div, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 4: {
      // Keep exponents small integers so powers stay unambiguous and finite.
      std::uniform_int_distribution<int> e(2, 3);
      return ref_node(RefNode::Pow, random_tree(rng, depth - 1),
                      ref_leaf(RefNode::Num, static_cast<double>(e(rng))));
    }
    case 5: return ref_node(RefNode::Neg, random_tree(rng, depth - 1));
    default: return random_tree(rng, 0);
  }
}

// Brute-force extrema by dense sampling, independent of field_extrema.
void dense_extrema(const Expr& e, double x0, double y0, double x1, double y1, int n, double& lo,
                   double& hi) {
  lo = 1e300;
  hi = -1e300;
  for (int j = 0; j < n; ++j) {
    double y = y0 + (y1 - y0) * j / (n - 1);
    for (int i = 0; i < n; ++i) {
      double x = x0 + (x1 - x0) * i / (n - 1);
      double v = e.eval(x, y);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
}

}  // namespace

TEST_SUITE("expr") {

TEST_CASE("literal parses to itself") {
  Expr e = Expr::parse("2.5");
  CHECK(e.eval(0, 0) == 2.5);
  CHECK(e.is_constant());
}

TEST_CASE("sin term vanishes at origin") {
  Expr e = Expr::parse("2.5 + 0.1*sin(x)");
  CHECK(e.eval(0, 0) == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("unbalanced parenthesis reports offset 5") {
  try {
    Expr::parse("2*(x+");
    FAIL("expected ParseError");
  } catch (const ParseError& err) {
    CHECK(err.offset() == 5);
    CHECK(!err.expected().empty());
  }
}

TEST_CASE("unknown identifier reports its offset") {
  try {
    Expr::parse("1 + foo(2)");
    FAIL("expected ParseError");
  } catch (const ParseError& err) {
    CHECK(err.offset() == 4);
  }
}

TEST_CASE("trailing garbage is rejected") {
  CHECK_THROWS_AS(Expr::parse("1+2 )"), ParseError);
  CHECK_THROWS_AS(Expr::parse(""), ParseError);
}

TEST_CASE("basic evaluation") {
  CHECK(Expr::parse("x^2+y").eval(2, 1) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(Expr::parse("2.8").eval(-3, 7) == 2.8);
  CHECK(Expr::parse("min(x, y) + max(x, y)").eval(2, 5) == doctest::Approx(7.0));
}

TEST_CASE("division by zero is an error, not inf") {
  try {
    Expr::parse("1/x").eval(0, 0);
    FAIL("expected EvalError");
  } catch (const EvalError& err) {
    CHECK(err.subexpr() == "1/x");
  }
}

TEST_CASE("sqrt of a negative is an error") {
  CHECK_THROWS_AS(Expr::parse("sqrt(x-2)").eval(0, 0), EvalError);
  CHECK(Expr::parse("sqrt(x)").eval(4, 0) == doctest::Approx(2.0));
}

TEST_CASE("overflow is reported") {
  CHECK_THROWS_AS(Expr::parse("exp(x)").eval(1e4, 0), EvalError);
}

TEST_CASE("t is only available in nonlinearity context") {
  Expr e = Expr::parse("x + t");
  CHECK(e.references_t());
  CHECK_THROWS_AS(e.eval(1, 1), EvalError);
  CHECK(e.eval(1, 1, 2) == doctest::Approx(3.0));
}

TEST_CASE("documented precedence") {
  CHECK(Expr::parse("1+2*3").eval(0, 0) == 7.0);
  CHECK(Expr::parse("2^3^2").eval(0, 0) == 512.0);     // right-associative
  CHECK(Expr::parse("-2^2").eval(0, 0) == 4.0);        // (-2)^2
  CHECK(Expr::parse("2^-1").eval(0, 0) == 0.5);
  CHECK(Expr::parse("6/2/3").eval(0, 0) == doctest::Approx(1.0));
  CHECK(Expr::parse("1-2-3").eval(0, 0) == -4.0);
}

TEST_CASE("random trees rendered to text evaluate like the reference") {
  std::mt19937 rng(20240811);
  std::uniform_real_distribution<double> pt(0.25, 2.0);
  int checked = 0;
  for (int k = 0; k < 400; ++k) {
    RefPtr tree = random_tree(rng, 3);
    std::string text;
    ref_render(*tree, text);
    Expr parsed = Expr::parse(text);
    for (int s = 0; s < 4; ++s) {
      double x = pt(rng), y = pt(rng);
      double expect;
      try {
        expect = ref_eval(*tree, x, y);
      } catch (const RefDomainError&) {
        continue;
      }
      double got;
      try {
        got = parsed.eval(x, y);
      } catch (const EvalError&) {
        continue;  // reference guard bands are looser than the evaluator's
      }
      CHECK(got == doctest::Approx(expect).epsilon(1e-12));
      ++checked;
    }
  }
  CHECK(checked > 800);
}

TEST_CASE("parse-unparse-reparse is structurally identical") {
  std::mt19937 rng(7);
  for (int k = 0; k < 300; ++k) {
    RefPtr tree = random_tree(rng, 3);
    std::string text;
    ref_render(*tree, text);
    Expr a = Expr::parse(text);
    Expr b = Expr::parse(a.to_string());
    CHECK(a.same_structure(b));
  }
  Expr f = Expr::parse("2.5 + 0.1*sin(x) - max(x, y/2)^2");
  CHECK(f.same_structure(Expr::parse(f.to_string())));
}

TEST_CASE("evaluation is deterministic") {
  Expr e = Expr::parse("sin(x)*cos(y) + exp(x/10) - abs(y)^2");
  double a = e.eval(0.3, -0.7);
  double b = e.eval(0.3, -0.7);
  CHECK(a == b);
}

TEST_CASE("shared trees evaluate safely from several threads") {
  Expr e = Expr::parse("2.5 + 0.1*sin(x)*cos(y) - x*y/8");
  const double expect = e.eval(0.4, 0.9);
  std::vector<std::thread> workers;
  std::atomic<int> mismatches{0};
  for (int w = 0; w < 4; ++w) {
    workers.emplace_back([&] {
      for (int k = 0; k < 20000; ++k)
        if (e.eval(0.4, 0.9) != expect) ++mismatches;
    });
  }
  for (auto& t : workers) t.join();
  CHECK(mismatches == 0);
}

TEST_CASE("extrema of a constant field") {
  ScalarField f = ScalarField::parse("2.5", "p");
  Extrema e = field_extrema(f, DomainSpec::rect(0, 0, 1, 1), 11);
  CHECK(e.low == 2.5);
  CHECK(e.high == 2.5);
}

TEST_CASE("extrema of the sin field on [0,pi]^2") {
  ScalarField f = ScalarField::parse("2.5 + 0.1*sin(x)", "p");
  // Independent oracle: dense sampling straight through the evaluator.
  double lo, hi;
  dense_extrema(f.expr, 0, 0, M_PI, M_PI, 2001, lo, hi);
  CHECK(lo == doctest::Approx(2.5).epsilon(1e-9));
  CHECK(hi == doctest::Approx(2.6).epsilon(1e-9));

  Extrema e = field_extrema(f, DomainSpec::rect(0, 0, M_PI, M_PI), 101);
  CHECK(e.low == doctest::Approx(2.5).epsilon(1e-3));
  CHECK(e.high == doctest::Approx(2.6).epsilon(1e-3));
}

TEST_CASE("extrema of x on the unit square with n=2") {
  ScalarField f = ScalarField::parse("x", "p");
  Extrema e = field_extrema(f, DomainSpec::rect(0, 0, 1, 1), 2);
  CHECK(e.low == 0.0);
  CHECK(e.high == 1.0);
}

TEST_CASE("extrema restricted to a disc") {
  ScalarField f = ScalarField::parse("x", "f");
  Extrema e = field_extrema(f, DomainSpec::disc(0, 0, 1), 41);
  CHECK(e.low == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(e.high == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("nested grid refinement only widens the extrema interval") {
  ScalarField f = ScalarField::parse("sin(3*x)*cos(2*y)+x/5", "f");
  DomainSpec dom = DomainSpec::rect(0, 0, 2, 2);
  double lo_prev = 1e300, hi_prev = -1e300;
  for (int n : {3, 5, 9, 17, 33, 65}) {
    Extrema e = field_extrema(f, dom, n);
    CHECK(e.low <= lo_prev + 1e-15);
    CHECK(e.high >= hi_prev - 1e-15);
    lo_prev = e.low;
    hi_prev = e.high;
    CHECK(e.low <= e.high);
  }
}

TEST_CASE("exponent membership check") {
  DomainSpec dom = DomainSpec::rect(0, 0, 1, 1);
  double margin = 0;
  CHECK(exponent_field_ok(ScalarField::parse("2.5", "p"), dom, 11, &margin));
  CHECK(margin == doctest::Approx(1.5));
  CHECK(!exponent_field_ok(ScalarField::parse("1", "p"), dom, 11, &margin));
  CHECK(!exponent_field_ok(ScalarField::parse("1.2 - x", "p"), dom, 11, &margin));
  CHECK(margin == doctest::Approx(-0.8));
}

TEST_CASE("field evaluation errors surface from extrema") {
  ScalarField f = ScalarField::parse("1/(x-0.5)", "f");
  CHECK_THROWS_AS(field_extrema(f, DomainSpec::rect(0, 0, 1, 1), 3), EvalError);
}

}  // TEST_SUITE
