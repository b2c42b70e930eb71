#include "fraclab/fields.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <sstream>

#include "fraclab/errors.hpp"

namespace fraclab {

namespace {

constexpr double kFdStep = 1e-6;

std::vector<double> random_point(const Box& box, std::mt19937_64& rng) {
  std::vector<double> p(box.ranges.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::uniform_real_distribution<double> dist(box.ranges[i].first, box.ranges[i].second);
    p[i] = dist(rng);
  }
  return p;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double spectral_norm(const std::vector<double>& J, int n) {
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(J.data(), n, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.transpose() * m, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double max_symmetric_eigenvalue(const std::vector<double>& J, int n) {
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(J.data(), n, n);
  Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

}  // namespace

bool Box::contains(std::span<const double> x) const {
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    if (x[i] < ranges[i].first || x[i] > ranges[i].second) return false;
  }
  return true;
}

const char* to_string(DivergenceSource src) {
  switch (src) {
    case DivergenceSource::kSupplied: return "supplied";
    case DivergenceSource::kSymbolic: return "symbolic";
    case DivergenceSource::kFiniteDifference: return "finite-difference";
  }
  return "?";
}

const char* to_string(CertificateKind kind) {
  switch (kind) {
    case CertificateKind::kCCondition: return "c-condition";
    case CertificateKind::kC1C2Condition: return "c1c2-condition";
    case CertificateKind::kFlux: return "flux";
  }
  return "?";
}

VectorField VectorField::make(int dim, std::vector<Expression> components, Box box,
                              std::optional<Expression> divergence) {
  if (dim < 1) throw ArgumentError("vector field dimension must be >= 1");
  if (static_cast<int>(components.size()) != dim) {
    throw DimensionMismatchError("vector field has " + std::to_string(components.size()) +
                                 " components but dimension " + std::to_string(dim));
  }
  if (box.dim() != dim) throw DimensionMismatchError("bounding box dimension does not match field dimension");
  for (const auto& [lo, hi] : box.ranges) {
    if (!(hi > lo)) throw DegenerateError("bounding box has an empty side");
  }
  for (const auto& c : components) {
    if (c.arity() > dim) throw DimensionMismatchError("component references a variable beyond the field dimension");
  }
  if (divergence && divergence->arity() > dim) {
    throw DimensionMismatchError("divergence references a variable beyond the field dimension");
  }

  VectorField X;
  X.dim_ = dim;
  X.components_ = std::move(components);
  X.box_ = std::move(box);
  X.constant_ = std::all_of(X.components_.begin(), X.components_.end(),
                            [](const Expression& e) { return e.is_constant(); });

  const bool polynomial = std::all_of(X.components_.begin(), X.components_.end(),
                                      [](const Expression& e) { return e.is_polynomial(); });
  if (polynomial) {
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) X.jacobian_.push_back(X.components_[i].derivative(j));
    }
  }
  if (divergence) {
    X.divergence_ = std::move(divergence);
    X.div_source_ = DivergenceSource::kSupplied;
  } else if (polynomial) {
    Expression div = Expression::constant(0.0);
    for (int i = 0; i < dim; ++i) div = div + X.jacobian_[i * dim + i];
    X.divergence_ = div;
    X.div_source_ = DivergenceSource::kSymbolic;
  } else {
    X.div_source_ = DivergenceSource::kFiniteDifference;
  }

  std::mt19937_64 rng(kDefaultSeed);
  if (X.div_source_ == DivergenceSource::kSupplied) {
    // The supplied divergence must agree with the field.
    for (int k = 0; k < 64; ++k) {
      const auto p = random_point(X.box_, rng);
      const auto J = X.jacobian(p);
      double fd = 0.0;
      for (int i = 0; i < dim; ++i) fd += J[i * dim + i];
      const double given = (*X.divergence_)(p);
      if (std::abs(given - fd) > 1e-6 * std::max(1.0, std::abs(fd))) {
        std::ostringstream os;
        os << "supplied divergence " << given << " disagrees with derivative of the field " << fd;
        throw ArgumentError(os.str());
      }
    }
  }

  // Lipschitz bound: sup of the Jacobian spectral norm over a grid plus random
  // points, with a 5% margin.
  double sup = 0.0;
  const int per_axis = std::max(2, static_cast<int>(std::lround(std::pow(4096.0, 1.0 / dim))));
  std::vector<int> idx(static_cast<std::size_t>(dim), 0);
  std::vector<double> p(static_cast<std::size_t>(dim));
  for (;;) {
    for (int d = 0; d < dim; ++d) {
      const auto [lo, hi] = X.box_.ranges[d];
      p[d] = lo + (hi - lo) * idx[d] / (per_axis - 1);
    }
    sup = std::max(sup, spectral_norm(X.jacobian(p), dim));
    int d = 0;
    while (d < dim && ++idx[d] == per_axis) idx[d++] = 0;
    if (d == dim) break;
  }
  for (int k = 0; k < 4096; ++k) sup = std::max(sup, spectral_norm(X.jacobian(random_point(X.box_, rng)), dim));
  X.lip_ = 1.05 * sup + 1e-12;
  return X;
}

VectorField VectorField::identity(int dim, Box box) {
  std::vector<Expression> comps;
  for (int i = 0; i < dim; ++i) comps.push_back(Expression::variable(i));
  return make(dim, std::move(comps), std::move(box));
}

VectorField VectorField::constant(std::vector<double> value, Box box) {
  std::vector<Expression> comps;
  for (double v : value) comps.push_back(Expression::constant(v));
  const int dim = static_cast<int>(comps.size());
  return make(dim, std::move(comps), std::move(box));
}

std::vector<double> VectorField::project(std::span<const double> x, std::vector<bool>* inside) const {
  if (static_cast<int>(x.size()) != dim_) {
    throw DimensionMismatchError("point dimension " + std::to_string(x.size()) + " does not match field dimension " +
                                 std::to_string(dim_));
  }
  std::vector<double> p(x.begin(), x.end());
  if (inside) inside->assign(x.size(), true);
  for (int i = 0; i < dim_; ++i) {
    const auto [lo, hi] = box_.ranges[i];
    if (p[i] < lo || p[i] > hi) {
      p[i] = std::clamp(p[i], lo, hi);
      if (inside) (*inside)[i] = false;
    }
  }
  return p;
}

std::vector<double> VectorField::value(std::span<const double> x) const {
  const auto p = project(x, nullptr);
  std::vector<double> out(static_cast<std::size_t>(dim_));
  for (int i = 0; i < dim_; ++i) out[i] = components_[i](p);
  return out;
}

std::vector<double> VectorField::jacobian(std::span<const double> x) const {
  std::vector<bool> inside;
  const auto p = project(x, &inside);
  std::vector<double> J(static_cast<std::size_t>(dim_ * dim_), 0.0);
  for (int j = 0; j < dim_; ++j) {
    if (!inside[j]) continue;
    if (!jacobian_.empty()) {
      for (int i = 0; i < dim_; ++i) J[i * dim_ + j] = jacobian_[i * dim_ + j](p);
    } else {
      auto q = p;
      const double h = kFdStep * std::max(1.0, std::abs(p[j]));
      q[j] = p[j] + h;
      std::vector<double> fp(static_cast<std::size_t>(dim_));
      for (int i = 0; i < dim_; ++i) fp[i] = components_[i](q);
      q[j] = p[j] - h;
      for (int i = 0; i < dim_; ++i) J[i * dim_ + j] = (fp[i] - components_[i](q)) / (2.0 * h);
    }
  }
  return J;
}

double VectorField::raw_divergence(std::span<const double> p) const {
  if (divergence_) return (*divergence_)(p);
  auto J = jacobian(p);
  double d = 0.0;
  for (int i = 0; i < dim_; ++i) d += J[i * dim_ + i];
  return d;
}

double VectorField::divergence(std::span<const double> x) const {
  std::vector<bool> inside;
  const auto p = project(x, &inside);
  if (std::all_of(inside.begin(), inside.end(), [](bool b) { return b; })) return raw_divergence(p);
  // Outside the box only the coordinates still inside contribute.
  const auto J = jacobian(x);
  double d = 0.0;
  for (int i = 0; i < dim_; ++i) d += J[i * dim_ + i];
  return d;
}

double VectorField::value1(double x) const {
  const auto [lo, hi] = box_.ranges[0];
  return components_[0](std::clamp(x, lo, hi));
}

double VectorField::derivative1(double x) const {
  const auto [lo, hi] = box_.ranges[0];
  if (x < lo || x > hi) return 0.0;
  return divergence(std::span<const double>(&x, 1));
}

double fractional_constant(int N, double s) {
  if (N < 1) throw ArgumentError("dimension must be >= 1");
  if (!(s > 0.0 && s < 1.0)) throw ArgumentError("fractional order s must lie in (0, 1)");
  static std::mutex mutex;
  static std::map<std::pair<int, double>, double> cache;
  std::lock_guard<std::mutex> lock(mutex);
  if (auto it = cache.find({N, s}); it != cache.end()) return it->second;
  const double log_c = -0.5 * N * std::log(M_PI) + std::log(s) + s * std::log(4.0) + std::lgamma(0.5 * N + s) -
                       std::lgamma(1.0 - s);
  const double c = std::exp(log_c);
  cache.emplace(std::make_pair(N, s), c);
  return c;
}

double eval_kernel_KX(const VectorField& X, double s, int N, std::span<const double> x, std::span<const double> y) {
  if (X.dim() != N || static_cast<int>(x.size()) != N || static_cast<int>(y.size()) != N) {
    throw DimensionMismatchError("kernel arguments do not match dimension N");
  }
  double r2 = 0.0;
  double scale = 1.0;
  for (int i = 0; i < N; ++i) {
    r2 += (x[i] - y[i]) * (x[i] - y[i]);
    scale = std::max({scale, std::abs(x[i]), std::abs(y[i])});
  }
  const double r = std::sqrt(r2);
  if (r < 1e-14 * scale) throw CoincidentPointsError("kernel evaluated at coincident points");
  const double c = fractional_constant(N, s);
  const auto Xx = X.value(x);
  const auto Xy = X.value(y);
  double q = 0.0;
  for (int i = 0; i < N; ++i) q += (Xx[i] - Xy[i]) * (x[i] - y[i]);
  const double bracket = X.divergence(x) + X.divergence(y) - (N + 2.0 * s) * q / r2;
  return 0.5 * c * bracket * std::pow(r, -N - 2.0 * s);
}

ConditionCertificate check_c_condition(const VectorField& X, const Box& box, int m, std::uint64_t seed) {
  if (m < 100) throw ArgumentError("certificate needs m >= 100 samples");
  if (box.dim() != X.dim()) throw DimensionMismatchError("box dimension does not match field");
  const int N = X.dim();
  std::mt19937_64 rng(seed);
  ConditionCertificate cert;
  cert.kind = CertificateKind::kCCondition;
  cert.samples = m;
  cert.seed = seed;
  cert.divergence_source = X.divergence_source();

  auto quad_ratio = [&](const std::vector<double>& x, const std::vector<double>& y, double* dist2) {
    const auto Xx = X.value(x);
    const auto Xy = X.value(y);
    double q = 0.0, r2 = 0.0;
    for (int i = 0; i < N; ++i) {
      q += (Xx[i] - Xy[i]) * (x[i] - y[i]);
      r2 += (x[i] - y[i]) * (x[i] - y[i]);
    }
    *dist2 = r2;
    return q;
  };

  double r2 = 0.0;
  std::vector<double> x0, y0;
  do {
    x0 = random_point(box, rng);
    y0 = random_point(box, rng);
    quad_ratio(x0, y0, &r2);
  } while (r2 == 0.0);
  const double c = quad_ratio(x0, y0, &r2) / r2;
  cert.constants = {c};

  const double div_tol = cert.divergence_source == DivergenceSource::kFiniteDifference ? 1e-6 : 1e-9;
  bool ok = true;
  std::ostringstream note;
  for (int k = 0; k < m && ok; ++k) {
    const auto x = random_point(box, rng);
    const auto y = random_point(box, rng);
    const double q = quad_ratio(x, y, &r2);
    if (std::abs(q - c * r2) > 1e-9 * (1.0 + std::abs(c) * r2)) {
      ok = false;
      note << "quadratic identity violated at sample " << k << ": " << q << " vs " << c * r2;
    }
    const double div = X.divergence(x);
    if (ok && std::abs(div - c * N) > div_tol * (1.0 + std::abs(c) * N)) {
      ok = false;
      note << "div X = " << div << " differs from cN = " << c * N << " at sample " << k;
    }
  }
  cert.pass = ok;
  cert.note = note.str();
  return cert;
}

ConditionCertificate check_c1_c2(const VectorField& X, const Box& box, int m, std::uint64_t seed) {
  if (m < 100) throw ArgumentError("certificate needs m >= 100 samples");
  if (box.dim() != X.dim()) throw DimensionMismatchError("box dimension does not match field");
  const int N = X.dim();
  std::mt19937_64 rng(seed);
  ConditionCertificate cert;
  cert.kind = CertificateKind::kC1C2Condition;
  cert.samples = m;
  cert.seed = seed;
  cert.divergence_source = X.divergence_source();

  double c1 = std::numeric_limits<double>::infinity();
  double c2 = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < m; ++k) {
    const auto x = random_point(box, rng);
    const auto y = random_point(box, rng);
    c1 = std::min(c1, X.divergence(x));
    // The pair supremum equals the supremum of the symmetric Jacobian's top
    // eigenvalue on convex sets; random pairs alone approach it slowly.
    c2 = std::max(c2, max_symmetric_eigenvalue(X.jacobian(x), N));
    const auto Xx = X.value(x);
    const auto Xy = X.value(y);
    double q = 0.0, r2 = 0.0;
    for (int i = 0; i < N; ++i) {
      q += (Xx[i] - Xy[i]) * (x[i] - y[i]);
      r2 += (x[i] - y[i]) * (x[i] - y[i]);
    }
    if (r2 > 0.0) c2 = std::max(c2, q / r2);
  }
  cert.constants = {c1, c2};
  const double tol = 1e-9 * (1.0 + std::abs(c2) * N);
  cert.pass = c2 > 0.0 && c1 > 0.5 * c2 * N + tol && c1 <= c2 * N + tol;
  if (!cert.pass) {
    std::ostringstream os;
    os << "constants outside the admissible range c2 > 0, c1 in (c2 N/2, c2 N]";
    cert.note = os.str();
  }
  return cert;
}

double nonexistence_threshold(double c1, double c2, int N, double s) {
  if (!(c2 > 0.0)) throw RangeError("threshold needs c2 > 0");
  if (!(c1 > 0.5 * c2 * N && c1 <= c2 * N)) throw RangeError("threshold needs c1 in (c2 N/2, c2 N]");
  if (!(s > 0.0 && s < 1.0)) throw RangeError("s must lie in (0, 1)");
  if (s >= c1 / c2 - 0.5 * N) {
    std::ostringstream os;
    os << "s = " << s << " is outside the admissible range (0, " << c1 / c2 - 0.5 * N << ")";
    throw RangeError(os.str());
  }
  return 2.0 * N / (2.0 * c1 / c2 - (N + 2.0 * s));
}

double min_flux(const VectorField& X, std::span<const BoundarySample2D> boundary) {
  if (boundary.empty()) throw ArgumentError("min_flux needs at least one boundary sample");
  if (X.dim() != 2) throw DimensionMismatchError("boundary samples are planar but the field has dimension " +
                                                 std::to_string(X.dim()));
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& b : boundary) {
    const auto v = X.value(b.point);
    lo = std::min(lo, dot(v, b.normal));
  }
  return lo;
}

ConditionCertificate flux_certificate(const VectorField& X, std::span<const BoundarySample2D> boundary,
                                      double tolerance) {
  ConditionCertificate cert;
  cert.kind = CertificateKind::kFlux;
  cert.min_flux = min_flux(X, boundary);
  cert.samples = static_cast<int>(boundary.size());
  cert.seed = 0;
  cert.divergence_source = X.divergence_source();
  cert.pass = *cert.min_flux >= -tolerance;
  return cert;
}

}  // namespace fraclab
