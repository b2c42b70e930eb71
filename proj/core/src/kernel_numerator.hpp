#pragma once

#include <algorithm>
#include <cmath>

#include "fraclab/fields.hpp"

namespace fraclab::detail {

struct Sample {
  double x;
  double X;
  double dX;
};

// Numerator of the unit kernel: the Gagliardo form.
struct UnitNumerator {
  static constexpr bool kConstant = true;
  Sample sample(double x) const { return {x, 0.0, 0.0}; }
  double operator()(const Sample&, const Sample&) const { return 1.0; }
  double diagonal(const Sample&) const { return 1.0; }
};

// Numerator of the deformation kernel in one dimension:
// X'(x) + X'(y) - (1+2s) (X(x)-X(y))/(x-y).
class DeformationNumerator {
 public:
  static constexpr bool kConstant = false;

  DeformationNumerator(const VectorField& X, double s) : X_(X), s_(s) {
    lo_ = X.box().ranges[0].first;
    hi_ = X.box().ranges[0].second;
    const Expression& e = X.components()[0];
    d1_ = e.derivative(0);
    d3_ = d1_.derivative(0).derivative(0);
    d5_ = d3_.derivative(0).derivative(0);
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double s() const { return s_; }

  Sample sample(double x) const { return {x, X_.value1(x), X_.derivative1(x)}; }

  // Difference quotient (X(x)-X(y))/(x-y); a midpoint Taylor expansion
  // replaces the quotient when the points nearly coincide.
  double quotient(const Sample& a, const Sample& b) const {
    const double r = b.x - a.x;
    const double m = 0.5 * (a.x + b.x);
    const bool inside = a.x >= lo_ && a.x <= hi_ && b.x >= lo_ && b.x <= hi_;
    if (inside && std::abs(r) < 1e-3 * std::max(1.0, std::abs(m))) {
      const double r2 = r * r;
      return d1_(m) + d3_(m) * r2 / 24.0 + d5_(m) * r2 * r2 / 1920.0;
    }
    return (a.X - b.X) / (a.x - b.x);
  }

  double operator()(const Sample& a, const Sample& b) const {
    return a.dX + b.dX - (1.0 + 2.0 * s_) * quotient(a, b);
  }

  double diagonal(const Sample& a) const { return (1.0 - 2.0 * s_) * a.dX; }

 private:
  const VectorField& X_;
  double s_;
  double lo_ = 0.0;
  double hi_ = 0.0;
  Expression d1_, d3_, d5_;
};

}  // namespace fraclab::detail
