#include "fraclab/quadrature.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>

#include "fraclab/errors.hpp"

namespace fraclab::quad {

namespace {

// Golub-Welsch for the Jacobi weight (1-x)^alpha (1+x)^beta on [-1, 1],
// mapped to [0, 1] with weight t^beta.
Rule golub_welsch_jacobi(int n, double alpha, double beta) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  const double ab = alpha + beta;
  for (int k = 0; k < n; ++k) {
    const double two_k_ab = 2.0 * k + ab;
    if (k == 0) {
      J(0, 0) = (beta - alpha) / (ab + 2.0);
    } else {
      J(k, k) = (beta * beta - alpha * alpha) / (two_k_ab * (two_k_ab + 2.0));
    }
    if (k + 1 < n) {
      const double k1 = k + 1.0;
      const double t = 2.0 * k1 + ab;
      const double num = 4.0 * k1 * (k1 + alpha) * (k1 + beta) * (k1 + ab);
      const double den = t * t * (t + 1.0) * (t - 1.0);
      const double b = std::sqrt(num / den);
      J(k, k + 1) = b;
      J(k + 1, k) = b;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  const double log_mu0 = (ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) + std::lgamma(beta + 1.0) -
                         std::lgamma(ab + 2.0);
  const double mu0 = std::exp(log_mu0);
  Rule r;
  r.nodes.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  // (1+x)^beta = 2^beta t^beta and dx = 2 dt.
  const double scale = std::pow(2.0, -(beta + 1.0));
  for (int i = 0; i < n; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    r.nodes[i] = 0.5 * (es.eigenvalues()(i) + 1.0);
    r.weights[i] = mu0 * v0 * v0 * scale;
  }
  return r;
}

struct RuleCache {
  std::mutex mutex;
  std::map<std::pair<int, double>, std::unique_ptr<Rule>> rules;

  const Rule& get(int n, double gamma) {
    if (n < 1) throw ArgumentError("quadrature rule needs at least one point");
    if (!(gamma > -1.0)) throw ArgumentError("Jacobi exponent must exceed -1");
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = rules[{n, gamma}];
    if (!slot) slot = std::make_unique<Rule>(golub_welsch_jacobi(n, 0.0, gamma));
    return *slot;
  }
};

RuleCache& cache() {
  static RuleCache c;
  return c;
}

}  // namespace

const Rule& gauss_legendre(int n) { return cache().get(n, 0.0); }

const Rule& gauss_jacobi(int n, double gamma) { return cache().get(n, gamma); }

Rule graded_rule(double a, double b, std::initializer_list<double> singular, int order, int levels) {
  Rule out;
  if (!(b > a)) return out;
  std::vector<double> pts = {a, b};
  for (double e : singular) {
    if (e >= a && e <= b) {
      pts.push_back(e);
      // Stop before the offsets fall below the spacing of doubles near e.
      const double floor = 256.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(e));
      double step = 1.0;
      for (int k = 0; k < levels; ++k) {
        step *= 0.5;
        if (e > a && (e - a) * step > floor) pts.push_back(e - (e - a) * step);
        if (e < b && (b - e) * step > floor) pts.push_back(e + (b - e) * step);
      }
    } else if (e < a) {
      const double d = a - e;
      for (double off = d; off < b - a; off *= 2.0) pts.push_back(a + off);
    } else {
      const double d = e - b;
      for (double off = d; off < b - a; off *= 2.0) pts.push_back(b - off);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const Rule& r = gauss_legendre(order);
  for (std::size_t p = 0; p + 1 < pts.size(); ++p) {
    const double lo = pts[p];
    const double len = pts[p + 1] - lo;
    if (len <= 0.0) continue;
    for (std::size_t q = 0; q < r.size(); ++q) {
      out.nodes.push_back(lo + len * r.nodes[q]);
      out.weights.push_back(len * r.weights[q]);
    }
  }
  return out;
}

double graded(const std::function<double(double)>& f, double a, double b, std::initializer_list<double> singular,
              int order, int levels) {
  const Rule r = graded_rule(a, b, singular, order, levels);
  double sum = 0.0;
  for (std::size_t q = 0; q < r.size(); ++q) sum += r.weights[q] * f(r.nodes[q]);
  return sum;
}

namespace {

struct Leaf {
  double value;
  double error;
  double l1;
};

Leaf kronrod(const std::function<double(double)>& f, double a, double b) {
  Leaf leaf{};
  leaf.value =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &leaf.error, &leaf.l1);
  // The non-recursive path reports the error of the rule on [-1, 1] without
  // the Jacobian, unlike the value and L1.
  leaf.error *= 0.5 * (b - a);
  return leaf;
}

void bisect(const std::function<double(double)>& f, double a, double b, const Leaf& leaf, double share,
            unsigned depth, unsigned max_depth, Leaf& total) {
  // Relative 1e-13 floor: below it the Kronrod estimate only measures roundoff.
  if (leaf.error <= share || depth >= max_depth || leaf.error <= 1e-13 * leaf.l1) {
    total.value += leaf.value;
    total.error += leaf.error;
    total.l1 += leaf.l1;
    return;
  }
  const double m = 0.5 * (a + b);
  const Leaf left = kronrod(f, a, m);
  const Leaf right = kronrod(f, m, b);
  bisect(f, a, m, left, 0.5 * share, depth + 1, max_depth, total);
  bisect(f, m, b, right, 0.5 * share, depth + 1, max_depth, total);
}

}  // namespace

double adaptive(const std::function<double(double)>& f, double a, double b, double tol, double* error,
                unsigned max_depth, double* l1) {
  Leaf total{0.0, 0.0, 0.0};
  if (b > a) {
    const Leaf first = kronrod(f, a, b);
    bisect(f, a, b, first, tol * first.l1, 0, max_depth, total);
  }
  if (error) *error = total.error;
  if (l1) *l1 = total.l1;
  return total.value;
}

double adaptive_abs(const std::function<double(double)>& f, double a, double b, double abs_tol, double* error,
                    unsigned max_depth) {
  Leaf total{0.0, 0.0, 0.0};
  if (b > a) bisect(f, a, b, kronrod(f, a, b), abs_tol, 0, max_depth, total);
  if (error) *error = total.error;
  return total.value;
}

}  // namespace fraclab::quad
