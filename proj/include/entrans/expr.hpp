#pragma once

// Arithmetic expressions over x1..xn used for constraint potentials, drift
// components and connection coefficients.
//
// Grammar (standard precedence, left associative except '^'):
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?        exponent must fold to an integer
//   primary := number | variable | func '(' expr ')' | '(' expr ')'
//
// Variables are x1..xn; x, y, z are aliases for x1, x2, x3. Functions are
// exp, ln, sin and cos.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "entrans/error.hpp"

namespace entrans {

class ParseError : public InputError {
 public:
  ParseError(std::size_t offset, std::string message, std::vector<std::string> expected);

  std::size_t offset() const noexcept { return offset_; }
  const std::string& detail() const noexcept { return detail_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::string detail_;
  std::vector<std::string> expected_;
};

// ln of a non-positive value, division by zero, or a non-finite result.
class DomainError : public InputError {
 public:
  DomainError(std::string message, std::string subexpression);

  const std::string& subexpression() const noexcept { return subexpression_; }

 private:
  std::string subexpression_;
};

namespace detail {
struct Node;
class Program;
struct ExprAccess;
}  // namespace detail

class Expr {
 public:
  enum class Kind { Constant, Variable, Add, Sub, Mul, Div, Neg, Pow, Exp, Ln, Sin, Cos };

  // Constant zero in one dimension.
  Expr();

  static Expr constant(double value, int dimension);
  // `index` is zero based: variable(0, n) is x1.
  static Expr variable(int index, int dimension);

  int dimension() const noexcept { return dimension_; }
  Kind kind() const noexcept;
  bool isConstant() const noexcept { return kind() == Kind::Constant; }
  // Value of a Constant node; 0 for anything else.
  double constantValue() const noexcept;

  // Throws DomainError naming the offending subexpression.
  double evaluate(std::span<const double> point) const;

  // Evaluates at `count` points given as one coordinate array per variable.
  // `scratch` is resized as needed and may be reused across calls. Domain
  // violations are reported exactly like evaluate().
  void evaluateBatch(std::span<const double* const> coords, std::size_t count, double* out,
                     std::vector<double>& scratch) const;

  // Exact partial derivative along zero-based `axis`, with constant folding.
  Expr derivative(int axis) const;

  // Re-parseable text; constants carry 17 significant digits.
  std::string toString() const;

  // Largest variable index referenced plus one (0 for constants).
  int usedDimension() const noexcept;

  // Same expression re-declared over `dimension` variables; throws when a
  // referenced variable would fall outside.
  Expr withDimension(int dimension) const;

 private:
  Expr(std::shared_ptr<const detail::Node> root, int dimension);

  friend struct detail::ExprAccess;

  std::shared_ptr<const detail::Node> root_;
  std::shared_ptr<const detail::Program> program_;
  int dimension_ = 1;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(double a, const Expr& b);

Expr parse(std::string_view source, int dimension);

// Zero-based axis; throws InputError when out of range.
Expr differentiate(const Expr& e, int axis);

inline double evaluate(const Expr& e, std::span<const double> point) { return e.evaluate(point); }

Expr exp(const Expr& e);
Expr ln(const Expr& e);
Expr sin(const Expr& e);
Expr cos(const Expr& e);
Expr pow(const Expr& e, int exponent);

}  // namespace entrans
