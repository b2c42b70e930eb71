#include "fraclab/assembly.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <vector>

#include "fraclab/errors.hpp"
#include "fraclab/quadrature.hpp"
#include "kernel_numerator.hpp"

namespace fraclab {

using detail::DeformationNumerator;
using detail::Sample;
using detail::UnitNumerator;

namespace {

// int_e^E |x-y|^{-1-2s} dy for x outside [e, E]; E may be infinite.
double unit_piece(double x, double e, double E, double s) {
  const double two_s = 2.0 * s;
  if (x <= e) {
    const double near = std::pow(e - x, -two_s);
    const double far = std::isinf(E) ? 0.0 : std::pow(E - x, -two_s);
    return (near - far) / two_s;
  }
  const double near = std::pow(x - E, -two_s);
  const double far = std::isinf(e) ? 0.0 : std::pow(x - e, -two_s);
  return (near - far) / two_s;
}

struct Piece {
  double e;
  double E;
};

std::vector<Piece> complement_pieces(const Domain1D& dom) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<Piece> out;
  const auto iv = dom.intervals();
  out.push_back({-inf, iv.front().a});
  for (std::size_t i = 0; i + 1 < iv.size(); ++i) out.push_back({iv[i].b, iv[i + 1].a});
  out.push_back({iv.back().b, inf});
  return out;
}

// kappa(x) = int over the complement of g(x,y) |x-y|^{-1-2s} dy.
double kappa_unit(double x, const std::vector<Piece>& pieces, double s) {
  double k = 0.0;
  for (const auto& p : pieces) k += unit_piece(x, p.e, p.E, s);
  return k;
}

double kappa_deformation(double x, const std::vector<Piece>& pieces, const DeformationNumerator& g) {
  const double s = g.s();
  const double two_s = 2.0 * s;
  const Sample sx = g.sample(x);
  const double gxx = g.diagonal(sx);
  const double lo = g.lo();
  const double hi = g.hi();
  double k = 0.0;
  auto remainder = [&](double e, double E) {
    if (!(E > e)) return 0.0;
    k += gxx * unit_piece(x, e, E, s);
    return quad::graded(
        [&](double y) {
          const Sample sy = g.sample(y);
          return (g(sx, sy) - gxx) * std::pow(std::abs(x - y), -1.0 - two_s);
        },
        e, E, {x});
  };
  for (const auto& p : pieces) {
    double e = p.e;
    double E = p.E;
    if (std::isinf(e)) {
      // y <= lo: the extended field is frozen at X(lo).
      const double d = x - lo;
      k += sx.dX * std::pow(d, -two_s) / two_s - (sx.X - g.sample(lo).X) * std::pow(d, -1.0 - two_s);
      e = lo;
    }
    if (std::isinf(E)) {
      const double d = hi - x;
      k += sx.dX * std::pow(d, -two_s) / two_s - (g.sample(hi).X - sx.X) * std::pow(d, -1.0 - two_s);
      E = hi;
    }
    k += remainder(e, E);
  }
  return k;
}

struct ElementRule {
  std::vector<double> x, w, phi0, phi1;
  std::vector<Sample> samples;
};

template <class Numerator>
class Assembler {
 public:
  Assembler(const Mesh1D& mesh, double s, const Numerator& g, QuadratureInfo& info)
      : mesh_(mesh), s_(s), g_(g), info_(info), c_(fractional_constant(1, s)) {
    const int n = mesh.dof_count();
    A_ = Matrix::Zero(n, n);
    const auto& gl = quad::gauss_legendre(info.separated_order);
    for (const auto& el : mesh.elements()) {
      ElementRule r;
      const double h = el.length();
      for (std::size_t q = 0; q < gl.size(); ++q) {
        const double x = el.x0 + h * gl.nodes[q];
        r.x.push_back(x);
        r.w.push_back(h * gl.weights[q]);
        r.phi0.push_back(1.0 - gl.nodes[q]);
        r.phi1.push_back(gl.nodes[q]);
        r.samples.push_back(g_.sample(x));
      }
      rules_.push_back(std::move(r));
    }
  }

  Matrix run() {
    const auto els = mesh_.elements();
    for (std::size_t i = 0; i < els.size(); ++i) identical(els[i]);
    for (std::size_t i = 0; i + 1 < els.size(); ++i) {
      if (els[i].interval == els[i + 1].interval) touching(els[i], els[i + 1]);
    }
    for (std::size_t i = 0; i < els.size(); ++i) {
      for (std::size_t j = i + 1; j < els.size(); ++j) {
        if (j == i + 1 && els[i].interval == els[j].interval) continue;
        separated(i, j);
      }
    }
    if (info_.include_exterior) {
      for (std::size_t i = 0; i < els.size(); ++i) exterior(els[i]);
    }
    return A_;
  }

 private:
  void add(int i, int j, double v) {
    if (i < 0 || j < 0) return;
    A_(i, j) += v;
  }

  void identical(const Mesh1D::Element& el) {
    const double h = el.length();
    const double base = std::pow(h, 3.0 - 2.0 * s_);
    double integral;
    if constexpr (Numerator::kConstant) {
      integral = 2.0 / ((2.0 - 2.0 * s_) * (3.0 - 2.0 * s_));
    } else {
      const auto& gj = quad::gauss_jacobi(info_.singular_order, 1.0 - 2.0 * s_);
      const auto& gl = quad::gauss_legendre(info_.singular_order);
      integral = 0.0;
      for (std::size_t a = 0; a < gj.size(); ++a) {
        const double u = gj.nodes[a];
        const double len = 1.0 - u;
        double inner = 0.0;
        for (std::size_t b = 0; b < gl.size(); ++b) {
          const double v = len * gl.nodes[b];
          const Sample p = g_.sample(el.x0 + h * (v + u));
          const Sample q = g_.sample(el.x0 + h * v);
          inner += gl.weights[b] * (g_(p, q) + g_(q, p));
        }
        integral += gj.weights[a] * inner * len;
      }
    }
    // slopes -1/h and +1/h; factor c/2 from the form.
    const double v = 0.5 * c_ * base * integral / (h * h);
    add(el.dof0, el.dof0, v);
    add(el.dof1, el.dof1, v);
    add(el.dof0, el.dof1, -v);
    add(el.dof1, el.dof0, -v);
  }

  void touching(const Mesh1D::Element& L, const Mesh1D::Element& R) {
    const double h1 = L.length();
    const double h2 = R.length();
    const double x1 = L.x1;
    const std::array<int, 3> dofs = {L.dof0, L.dof1, R.dof1};
    const auto& gj = quad::gauss_jacobi(info_.singular_order, 2.0 - 2.0 * s_);
    const auto& gl = quad::gauss_legendre(info_.singular_order);
    double local[3][3] = {};
    for (int tri = 0; tri < 2; ++tri) {
      for (std::size_t b = 0; b < gl.size(); ++b) {
        const double t = gl.nodes[b];
        std::array<double, 3> d;
        double denom;
        if (tri == 0) {
          d = {1.0, t - 1.0, -t};
          denom = h1 + h2 * t;
        } else {
          d = {t, 1.0 - t, -1.0};
          denom = h1 * t + h2;
        }
        double radial = 0.0;
        if constexpr (Numerator::kConstant) {
          double wsum = 0.0;
          for (double wa : gj.weights) wsum += wa;
          radial = wsum;
        } else {
          for (std::size_t a = 0; a < gj.size(); ++a) {
            const double r = gj.nodes[a];
            const double xi = tri == 0 ? h1 * r : h1 * r * t;
            const double eta = tri == 0 ? h2 * r * t : h2 * r;
            radial += gj.weights[a] * g_(g_.sample(x1 - xi), g_.sample(x1 + eta));
          }
        }
        const double f = gl.weights[b] * radial * std::pow(denom, -1.0 - 2.0 * s_) * h1 * h2;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) local[i][j] += f * d[i] * d[j];
      }
    }
    // Both orderings of the pair contribute: 2 * c/2.
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) add(dofs[i], dofs[j], c_ * local[i][j]);
  }

  struct Blocks {
    double P[2][2] = {};
    double R[2][2] = {};
    double Q[2][2] = {};
  };

  void separated(std::size_t i, std::size_t j) {
    const auto& T = mesh_.elements()[i];
    const auto& U = mesh_.elements()[j];
    Blocks B;
    const double gap = std::max(U.x0 - T.x1, T.x0 - U.x1);
    const double size = std::max(T.length(), U.length());
    if (gap >= size) {
      tensor(rules_[i], rules_[j], B);
    } else {
      ++info_.subdivided_pairs;
      split(T, U, T.x0, T.x1, U.x0, U.x1, 0, B);
    }
    const int td[2] = {T.dof0, T.dof1};
    const int ud[2] = {U.dof0, U.dof1};
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        add(td[a], td[b], c_ * B.P[a][b]);
        add(ud[a], ud[b], c_ * B.R[a][b]);
        add(td[a], ud[b], -c_ * B.Q[a][b]);
        add(ud[b], td[a], -c_ * B.Q[a][b]);
      }
    }
  }

  void tensor(const ElementRule& rx, const ElementRule& ry, Blocks& B) const {
    const double expo = -1.0 - 2.0 * s_;
    const std::size_t nq = rx.x.size();
    for (std::size_t q = 0; q < nq; ++q) {
      double row = 0.0;
      double m0 = 0.0;
      double m1 = 0.0;
      double r00 = 0.0, r01 = 0.0, r11 = 0.0;
      for (std::size_t r = 0; r < ry.x.size(); ++r) {
        double k = ry.w[r] * std::pow(std::abs(rx.x[q] - ry.x[r]), expo);
        if constexpr (!Numerator::kConstant) k *= g_(rx.samples[q], ry.samples[r]);
        row += k;
        m0 += k * ry.phi0[r];
        m1 += k * ry.phi1[r];
        r00 += k * ry.phi0[r] * ry.phi0[r];
        r01 += k * ry.phi0[r] * ry.phi1[r];
        r11 += k * ry.phi1[r] * ry.phi1[r];
      }
      const double w = rx.w[q];
      const double p0 = rx.phi0[q];
      const double p1 = rx.phi1[q];
      B.P[0][0] += w * p0 * p0 * row;
      B.P[0][1] += w * p0 * p1 * row;
      B.P[1][1] += w * p1 * p1 * row;
      B.R[0][0] += w * r00;
      B.R[0][1] += w * r01;
      B.R[1][1] += w * r11;
      B.Q[0][0] += w * p0 * m0;
      B.Q[0][1] += w * p0 * m1;
      B.Q[1][0] += w * p1 * m0;
      B.Q[1][1] += w * p1 * m1;
    }
    B.P[1][0] = B.P[0][1];
    B.R[1][0] = B.R[0][1];
  }

  // Sub-rectangle [xa, xb] x [ya, yb] of T x U, split until separated.
  void split(const Mesh1D::Element& T, const Mesh1D::Element& U, double xa, double xb, double ya, double yb,
             int depth, Blocks& B) const {
    const double gap = std::max(ya - xb, xa - yb);
    const double lx = xb - xa;
    const double ly = yb - ya;
    if (gap < std::max(lx, ly)) {
      if (depth >= info_.max_subdivision) {
        throw QuadratureError("near-pair subdivision exceeded depth " + std::to_string(info_.max_subdivision));
      }
      if (lx >= ly) {
        const double m = 0.5 * (xa + xb);
        split(T, U, xa, m, ya, yb, depth + 1, B);
        split(T, U, m, xb, ya, yb, depth + 1, B);
      } else {
        const double m = 0.5 * (ya + yb);
        split(T, U, xa, xb, ya, m, depth + 1, B);
        split(T, U, xa, xb, m, yb, depth + 1, B);
      }
      return;
    }
    Blocks local;
    tensor(sub_rule(T, xa, xb), sub_rule(U, ya, yb), local);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        B.P[a][b] += local.P[a][b];
        B.R[a][b] += local.R[a][b];
        B.Q[a][b] += local.Q[a][b];
      }
  }

  ElementRule sub_rule(const Mesh1D::Element& el, double a, double b) const {
    const auto& gl = quad::gauss_legendre(info_.separated_order);
    ElementRule r;
    const double h = el.length();
    for (std::size_t q = 0; q < gl.size(); ++q) {
      const double x = a + (b - a) * gl.nodes[q];
      r.x.push_back(x);
      r.w.push_back((b - a) * gl.weights[q]);
      r.phi0.push_back((el.x1 - x) / h);
      r.phi1.push_back((x - el.x0) / h);
      r.samples.push_back(g_.sample(x));
    }
    return r;
  }

  void exterior(const Mesh1D::Element& el) {
    if (pieces_.empty()) pieces_ = complement_pieces(mesh_.domain());
    const Interval iv = mesh_.domain().intervals()[el.interval];
    const quad::Rule r = quad::graded_rule(el.x0, el.x1, {iv.a, iv.b}, 8, 30);
    const double h = el.length();
    double m00 = 0.0, m01 = 0.0, m11 = 0.0;
    for (std::size_t q = 0; q < r.size(); ++q) {
      const double x = r.nodes[q];
      double k;
      if constexpr (Numerator::kConstant) {
        k = kappa_unit(x, pieces_, s_);
      } else {
        k = kappa_deformation(x, pieces_, g_);
      }
      const double p0 = (el.x1 - x) / h;
      const double p1 = (x - el.x0) / h;
      const double w = r.weights[q] * k;
      m00 += w * p0 * p0;
      m01 += w * p0 * p1;
      m11 += w * p1 * p1;
    }
    add(el.dof0, el.dof0, c_ * m00);
    add(el.dof1, el.dof1, c_ * m11);
    add(el.dof0, el.dof1, c_ * m01);
    add(el.dof1, el.dof0, c_ * m01);
  }

  const Mesh1D& mesh_;
  double s_;
  const Numerator& g_;
  QuadratureInfo& info_;
  double c_;
  Matrix A_;
  std::vector<ElementRule> rules_;
  std::vector<Piece> pieces_;
};

void check_order(double s) {
  if (!(s > 0.0 && s < 1.0)) throw ArgumentError("fractional order s must lie in (0, 1)");
}

}  // namespace

Matrix assemble_mass(const Mesh1D& mesh) {
  const int n = mesh.dof_count();
  Matrix M = Matrix::Zero(n, n);
  for (const auto& el : mesh.elements()) {
    const double h = el.length();
    if (el.dof0 >= 0) M(el.dof0, el.dof0) += h / 3.0;
    if (el.dof1 >= 0) M(el.dof1, el.dof1) += h / 3.0;
    if (el.dof0 >= 0 && el.dof1 >= 0) {
      M(el.dof0, el.dof1) += h / 6.0;
      M(el.dof1, el.dof0) += h / 6.0;
    }
  }
  return M;
}

Matrix assemble_gagliardo(const Mesh1D& mesh, double s, QuadratureInfo* info) {
  check_order(s);
  QuadratureInfo local;
  QuadratureInfo& qi = info ? *info : local;
  qi.subdivided_pairs = 0;
  UnitNumerator g;
  Assembler<UnitNumerator> assembler(mesh, s, g, qi);
  return assembler.run();
}

AssembledForms assemble_forms(const Mesh1D& mesh, double s, QuadratureInfo info) {
  Matrix A = assemble_gagliardo(mesh, s, &info);
  return AssembledForms{mesh, s, assemble_mass(mesh), std::move(A), info};
}

DeformationMatrix assemble_deformation(const Mesh1D& mesh, const VectorField& X, double s, QuadratureInfo info) {
  check_order(s);
  if (X.dim() != 1) throw DimensionMismatchError("deformation assembly needs a one-dimensional field");
  const auto [lo, hi] = X.box().ranges[0];
  const double lower = mesh.domain().lower();
  const double upper = mesh.domain().upper();
  if (lo > lower || hi < upper) {
    throw ArgumentError("field box must contain the domain hull");
  }
  info.subdivided_pairs = 0;
  DeformationNumerator g(X, s);
  Assembler<DeformationNumerator> assembler(mesh, s, g, info);
  Matrix B = assembler.run();
  return DeformationMatrix{mesh, s, X, std::move(B), info};
}

PointwiseValue frac_laplacian_pointwise(const std::function<double(double)>& phi, double s, double x,
                                        const FracLapOptions& opt) {
  check_order(s);
  if (!(opt.R > 0.0)) throw ArgumentError("truncation radius must be positive");
  if (!(opt.tol > 0.0)) throw ArgumentError("tolerance must be positive");
  const double c = fractional_constant(1, s);
  const double two_s = 2.0 * s;
  const double fx = phi(x);
  auto D = [&](double y) { return 2.0 * fx - phi(x + y) - phi(x - y); };
  auto D2 = [&](double y) { return D(y) / (y * y); };

  // Near the origin D(y) ~ D2(0) y^2 + k y^4.
  double y0 = std::min(0.1 * opt.panel, 0.25 * opt.R);
  double taylor = 0.0;
  double taylor_err = std::numeric_limits<double>::infinity();
  double best_y0 = y0;
  // Halving stops once roundoff in D2 makes the estimate worse.
  for (int it = 0; it < 40; ++it) {
    const double a = D2(y0);
    const double b = D2(0.5 * y0);
    const double d20 = (4.0 * b - a) / 3.0;
    const double k = (a - d20) / (y0 * y0);
    const double t = d20 * std::pow(y0, 2.0 - two_s) / (2.0 - two_s) + k * std::pow(y0, 4.0 - two_s) / (4.0 - two_s);
    const double e = std::abs(k) * std::pow(y0, 4.0 - two_s) / (4.0 - two_s) +
                     std::abs(a - b) * 1e-3 * std::pow(y0, 2.0 - two_s);
    if (e < taylor_err) {
      taylor = t;
      taylor_err = e;
      best_y0 = y0;
    } else if (it > 3 && e > 4.0 * taylor_err) {
      break;
    }
    if (c * taylor_err <= opt.tol / 8.0) break;
    y0 *= 0.5;
  }
  y0 = best_y0;

  auto integrand = [&](double y) { return D(y) * std::pow(y, -1.0 - two_s); };
  std::vector<double> breaks = {y0};
  const double unit = std::min(opt.panel, opt.R);
  while (breaks.back() * 2.0 < unit) breaks.push_back(breaks.back() * 2.0);
  breaks.push_back(unit);
  for (double b = unit + opt.panel; b < opt.R; b += opt.panel) breaks.push_back(b);
  if (breaks.back() < opt.R) breaks.push_back(opt.R);
  if (opt.support) {
    // Kinks of D where x +- y leaves the support.
    for (double k : {x - opt.support->a, opt.support->b - x, opt.support->a - x, x - opt.support->b}) {
      if (k > breaks.front() && k < breaks.back()) breaks.push_back(k);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(),
                             [](double u, double v) { return std::abs(v - u) <= 1e-9 * std::abs(v); }),
                 breaks.end());
  }
  // Absolute budget per panel.
  const double budget = opt.tol / (4.0 * c * static_cast<double>(breaks.size()));
  double body = 0.0;
  double body_err = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    double err = 0.0;
    body += quad::adaptive_abs(integrand, breaks[i], breaks[i + 1], budget, &err, 24);
    body_err += err;
  }

  // Beyond R the 2 phi(x) part is exact; the neighbour part is bounded.
  double tail = 2.0 * fx * std::pow(opt.R, -two_s) / two_s;
  double tail_err = 0.0;
  const bool covered = opt.support && x - opt.R <= opt.support->a && x + opt.R >= opt.support->b;
  if (!covered) {
    double sup = 0.0;
    if (opt.sup_abs) {
      sup = *opt.sup_abs;
    } else {
      const int m = 4000;
      for (int i = 0; i <= m; ++i) sup = std::max(sup, std::abs(phi(x - opt.R + 2.0 * opt.R * i / m)));
    }
    tail_err = 2.0 * sup * std::pow(opt.R, -two_s) / two_s;
  }

  const double value = c * (taylor + body + tail);
  const double error = c * (taylor_err + body_err + tail_err);
  if (!(error <= opt.tol)) {
    throw ToleranceError("pointwise fractional Laplacian error estimate " + std::to_string(error) +
                         " exceeds tolerance " + std::to_string(opt.tol));
  }
  return {value, error};
}

double integrate_density(const Mesh1D& mesh, std::span<const double> nodal,
                         const std::function<double(double)>& density,
                         const std::function<double(double)>& weight) {
  if (static_cast<int>(nodal.size()) != mesh.dof_count()) {
    throw DimensionMismatchError("nodal vector length does not match the mesh");
  }
  const auto& gl = quad::gauss_legendre(8);
  double sum = 0.0;
  for (const auto& el : mesh.elements()) {
    const double u0 = el.dof0 >= 0 ? nodal[el.dof0] : 0.0;
    const double u1 = el.dof1 >= 0 ? nodal[el.dof1] : 0.0;
    const double h = el.length();
    for (std::size_t q = 0; q < gl.size(); ++q) {
      const double t = gl.nodes[q];
      const double x = el.x0 + h * t;
      sum += h * gl.weights[q] * density((1.0 - t) * u0 + t * u1) * weight(x);
    }
  }
  return sum;
}

Vector load_vector(const Mesh1D& mesh, std::span<const double> nodal, const std::function<double(double)>& f) {
  if (static_cast<int>(nodal.size()) != mesh.dof_count()) {
    throw DimensionMismatchError("nodal vector length does not match the mesh");
  }
  const auto& gl = quad::gauss_legendre(8);
  Vector b = Vector::Zero(mesh.dof_count());
  for (const auto& el : mesh.elements()) {
    const double u0 = el.dof0 >= 0 ? nodal[el.dof0] : 0.0;
    const double u1 = el.dof1 >= 0 ? nodal[el.dof1] : 0.0;
    const double h = el.length();
    double b0 = 0.0;
    double b1 = 0.0;
    for (std::size_t q = 0; q < gl.size(); ++q) {
      const double t = gl.nodes[q];
      const double v = h * gl.weights[q] * f((1.0 - t) * u0 + t * u1);
      b0 += v * (1.0 - t);
      b1 += v * t;
    }
    if (el.dof0 >= 0) b(el.dof0) += b0;
    if (el.dof1 >= 0) b(el.dof1) += b1;
  }
  return b;
}

Vector interpolate(const Mesh1D& mesh, const std::function<double(double)>& phi) {
  const auto xs = mesh.dof_coordinates();
  Vector v(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) v(static_cast<Eigen::Index>(i)) = phi(xs[i]);
  return v;
}

void write_matrix(std::ostream& os, const Matrix& m) {
  const auto old = os.precision(17);
  os << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      os << m(i, j);
    }
    os << '\n';
  }
  os.precision(old);
}

}  // namespace fraclab
