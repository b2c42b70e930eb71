#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace fraclab {

/// Closed-form scalar expression over up to three variables.
///
/// Grammar: `+ - * / ^` (integer exponents only), parentheses, decimal
/// literals, unary minus, variables `x y z` (aliases `x1 x2 x3`). Values are
/// immutable and cheap to copy; evaluation is reentrant.
class Expression {
 public:
  struct Node;

  Expression();
  static Expression parse(std::string_view text);
  static Expression constant(double value);
  static Expression variable(int index);

  double operator()(std::span<const double> point) const;
  double operator()(double x) const { return (*this)(std::span<const double>(&x, 1)); }
  double operator()(double x, double y) const {
    const double p[2] = {x, y};
    return (*this)(std::span<const double>(p, 2));
  }

  /// Exact symbolic partial derivative with respect to variable `index`.
  Expression derivative(int index) const;

  /// True when no division has a variable-dependent denominator.
  bool is_polynomial() const;

  /// Highest variable index referenced plus one (0 for constants).
  int arity() const;

  bool is_constant() const { return arity() == 0; }

  std::string to_string() const;

  friend Expression operator+(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a, const Expression& b);
  friend Expression operator*(const Expression& a, const Expression& b);
  friend Expression operator/(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a);

 private:
  explicit Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
  std::shared_ptr<const Node> root_;
};

}  // namespace fraclab
