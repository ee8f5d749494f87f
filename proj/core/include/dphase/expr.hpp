#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dphase {

// Parse failure: 0-based character offset into the source plus a short
// description of what the parser expected at that position.
class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t offset, std::string expected, const std::string& message)
      : std::runtime_error(message), offset_(offset), expected_(std::move(expected)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::string& expected() const noexcept { return expected_; }

private:
  std::size_t offset_;
  std::string expected_;
};

// Evaluation failure (division by zero, sqrt of a negative number,
// overflow to a non-finite value).  Carries the offending subexpression
// rendered back to text.
class EvalError : public std::runtime_error {
public:
  EvalError(std::string subexpr, const std::string& message)
      : std::runtime_error(message), subexpr_(std::move(subexpr)) {}

  const std::string& subexpr() const noexcept { return subexpr_; }

private:
  std::string subexpr_;
};

// Immutable arithmetic expression over the variables x, y and (for
// nonlinearities f(x,t)) t.
//
// Grammar: numeric literals, binary + - * / ^, unary minus, the calls
// sin cos exp abs sqrt min max, and parentheses.  '^' binds tightest and
// is right-associative; unary minus binds tighter than the base of '^',
// so "-x^2" parses as "(-x)^2".  The full EBNF lives in
// docs/expression-grammar.ebnf.
//
// Trees are immutable after parsing; evaluation is pure, so shared trees
// may be evaluated concurrently.
class Expr {
public:
  struct Node;

  Expr() = default;

  static Expr parse(std::string_view src);

  // Spatial evaluation; referencing t here is an EvalError.
  double eval(double x, double y) const;
  // Evaluation with the nonlinearity argument t available.
  double eval(double x, double y, double t) const;

  // Round-trippable rendering: parse(to_string()) is structurally
  // identical to *this.
  std::string to_string() const;

  bool references_t() const;
  // True when the tree contains no variables (pure arithmetic).
  bool is_constant() const;

  bool same_structure(const Expr& other) const;

  explicit operator bool() const noexcept { return root_ != nullptr; }

private:
  explicit Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

  std::shared_ptr<const Node> root_;
};

}  // namespace dphase
