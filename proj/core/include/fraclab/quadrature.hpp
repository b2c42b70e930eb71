#pragma once

#include <functional>
#include <vector>

namespace fraclab::quad {

/// Quadrature rule on [0, 1].
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [0, 1]. Cached; safe to call concurrently.
const Rule& gauss_legendre(int n);

/// n-point Gauss-Jacobi rule on [0, 1] for the weight t^gamma, gamma > -1.
/// The weight is folded into `weights`; integrands are evaluated without it.
const Rule& gauss_jacobi(int n, double gamma);

/// Nodes and weights of the composite rule used by `graded`.
Rule graded_rule(double a, double b, std::initializer_list<double> singular, int order = 8, int levels = 30);

/// Integrates f over [a, b] with a composite Gauss-Legendre rule whose panels
/// shrink geometrically toward the listed singular points (points outside
/// [a, b] attract refinement from the nearest end).
double graded(const std::function<double(double)>& f, double a, double b, std::initializer_list<double> singular,
              int order = 8, int levels = 30);

/// Adaptive bisection with 31-point Gauss-Kronrod leaves. The absolute budget
/// is `tol` times the L1 norm estimated on the first pass and is split evenly
/// between halves. `error` receives the summed Kronrod estimates and `l1` the
/// integral of |f|.
double adaptive(const std::function<double(double)>& f, double a, double b, double tol, double* error = nullptr,
                unsigned max_depth = 20, double* l1 = nullptr);

/// Same driver with an absolute tolerance.
double adaptive_abs(const std::function<double(double)>& f, double a, double b, double abs_tol,
                    double* error = nullptr, unsigned max_depth = 20);

}  // namespace fraclab::quad
