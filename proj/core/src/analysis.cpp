#include "fraclab/analysis.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>

#include "fraclab/errors.hpp"
#include "fraclab/quadrature.hpp"
#include "kernel_numerator.hpp"

namespace fraclab {

namespace {

double gamma_sq(double s) {
  const double g = std::tgamma(1.0 + s);
  return g * g;
}

std::span<const double> view(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

std::vector<TraceEstimate> all_traces(const Mesh1D& mesh, const Vector& u, double s, TraceWindow window) {
  std::vector<TraceEstimate> out;
  for (const auto& bp : mesh.domain().boundary_points()) out.push_back(extract_trace(mesh, u, s, bp, window));
  return out;
}

double field_at(const VectorField& X, double x) { return X.value1(x); }

// int (u_h' X) v_h over the mesh: element slope of u times Gauss-Legendre of X v_h.
double advection(const Mesh1D& mesh, const Vector& u, const Vector& v, const VectorField& X,
                 double* magnitude = nullptr) {
  const auto& gl = quad::gauss_legendre(8);
  double sum = 0.0;
  double mag = 0.0;
  for (const auto& el : mesh.elements()) {
    const double u0 = el.dof0 >= 0 ? u(el.dof0) : 0.0;
    const double u1 = el.dof1 >= 0 ? u(el.dof1) : 0.0;
    const double v0 = el.dof0 >= 0 ? v(el.dof0) : 0.0;
    const double v1 = el.dof1 >= 0 ? v(el.dof1) : 0.0;
    const double h = el.length();
    const double slope = (u1 - u0) / h;
    double part = 0.0;
    double apart = 0.0;
    for (std::size_t q = 0; q < gl.size(); ++q) {
      const double t = gl.nodes[q];
      const double val = field_at(X, el.x0 + h * t) * ((1.0 - t) * v0 + t * v1);
      part += gl.weights[q] * val;
      apart += gl.weights[q] * std::abs(val);
    }
    sum += slope * part * h;
    mag += std::abs(slope) * apart * h;
  }
  if (magnitude) *magnitude = mag;
  return sum;
}

void finish(PohozaevReport& r) {
  r.abs_residual = std::abs(r.lhs - r.rhs);
  r.rel_residual = relative_residual(r.lhs, r.rhs);
}

}  // namespace

double relative_residual(double lhs, double rhs) {
  return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-30});
}

const char* to_string(Identity id) {
  switch (id) {
    case Identity::kGeneralized: return "pohozaev";
    case Identity::kRosOtonSerra: return "ros-oton-serra";
    case Identity::kIbp: return "ibp";
    case Identity::kL2Radial: return "l2-radial";
    case Identity::kLemma21: return "lemma21";
  }
  return "unknown";
}

double Nonlinearity::primitive(double t) const {
  if (kind == Kind::kLinear) return 0.5 * value * t * t;
  return std::pow(std::abs(t), value) / value;
}

TraceEstimate extract_trace(const Mesh1D& mesh, const Vector& u, double s, const BoundaryPoint1D& bp,
                            TraceWindow window) {
  if (u.size() != mesh.dof_count()) throw DimensionMismatchError("nodal vector length does not match the mesh");
  if (!(window.hi > window.lo) || !(window.lo >= 0.0)) throw ArgumentError("invalid trace window");
  const double hb = mesh.boundary_element_size(bp);
  const double dmin = window.lo * hb;
  const double dmax = window.hi * hb;
  const Interval iv = mesh.domain().intervals()[bp.interval];
  const auto xs = mesh.dof_coordinates();
  std::vector<double> delta;
  std::vector<double> values;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] <= iv.a || xs[i] >= iv.b) continue;
    const double d = std::abs(xs[i] - bp.x);
    if (d < dmin || d > dmax) continue;
    delta.push_back(d);
    values.push_back(u(static_cast<Eigen::Index>(i)));
  }
  const int m = static_cast<int>(delta.size());
  if (m < 4) {
    throw WindowError("trace window [" + std::to_string(dmin) + ", " + std::to_string(dmax) + "] holds " +
                      std::to_string(m) + " nodes, need at least 4");
  }
  const double dscale = *std::max_element(delta.begin(), delta.end());
  Eigen::MatrixXd F(m, 2);
  Eigen::VectorXd y(m);
  for (int j = 0; j < m; ++j) {
    const double base = std::pow(delta[j], s);
    F(j, 0) = base;
    F(j, 1) = base * delta[j] / dscale;
    y(j) = values[j];
  }
  const Eigen::Vector2d coef = F.colPivHouseholderQr().solve(y);
  const double psi = coef(0);
  const double slope = coef(1) / dscale;
  const double ynorm = y.norm();
  const double residual = ynorm > 0.0 ? (F * coef - y).norm() / ynorm : 0.0;
  return TraceEstimate{bp,
                       psi,
                       psi != 0.0 ? slope / psi : 0.0,
                       *std::min_element(delta.begin(), delta.end()),
                       dscale,
                       residual,
                       m};
}

PohozaevReport pohozaev_check(const Mesh1D& mesh, double s, const Vector& u, const VectorField& X,
                              const Nonlinearity& nl, const Matrix* deformation, TraceWindow window) {
  PohozaevReport r;
  r.identity = Identity::kGeneralized;
  r.n = mesh.n_per_interval();
  r.s = s;
  r.traces = all_traces(mesh, u, s, window);
  double boundary = 0.0;
  for (const auto& t : r.traces) boundary += t.psi * t.psi * field_at(X, t.point.x) * t.point.normal;
  boundary *= gamma_sq(s);

  const double volume =
      2.0 * integrate_density(
                mesh, view(u), [&](double t) { return nl.primitive(t); },
                [&](double x) { return X.derivative1(x); });
  Matrix owned;
  if (!deformation) {
    owned = assemble_deformation(mesh, X, s).matrix;
    deformation = &owned;
  }
  const double energy = u.dot(*deformation * u);
  r.lhs = boundary;
  r.rhs = volume - energy;
  r.terms = {{"boundary", boundary}, {"volume", volume}, {"deformation", energy}};
  finish(r);
  return r;
}

PohozaevReport ros_oton_serra_check(const Mesh1D& mesh, double s, const EigenPair& pair, TraceWindow window) {
  PohozaevReport r;
  r.identity = Identity::kRosOtonSerra;
  r.n = mesh.n_per_interval();
  r.s = s;
  r.traces = all_traces(mesh, pair.u, s, window);
  double boundary = 0.0;
  for (const auto& t : r.traces) boundary += t.psi * t.psi * t.point.x * t.point.normal;
  const Matrix M = assemble_mass(mesh);
  r.lhs = gamma_sq(s) * boundary;
  r.rhs = 2.0 * s * pair.lambda * pair.u.dot(M * pair.u);
  r.terms = {{"boundary", r.lhs}, {"eigen", r.rhs}};
  finish(r);
  return r;
}

PohozaevReport ibp_check(const Mesh1D& mesh, double s, const EigenPair& first, const EigenPair& second,
                         const VectorField& X, const Matrix* deformation, TraceWindow window) {
  PohozaevReport r;
  r.identity = Identity::kIbp;
  r.n = mesh.n_per_interval();
  r.s = s;
  const auto tu = all_traces(mesh, first.u, s, window);
  const auto tv = all_traces(mesh, second.u, s, window);
  double boundary = 0.0;
  for (std::size_t i = 0; i < tu.size(); ++i) {
    boundary += tu[i].psi * tv[i].psi * field_at(X, tu[i].point.x) * tu[i].point.normal;
  }
  boundary *= gamma_sq(s);
  r.traces = tu;
  r.traces.insert(r.traces.end(), tv.begin(), tv.end());
  Matrix owned;
  if (!deformation) {
    owned = assemble_deformation(mesh, X, s).matrix;
    deformation = &owned;
  }
  double abs1 = 0.0;
  double abs2 = 0.0;
  const double t1 = second.lambda * advection(mesh, first.u, second.u, X, &abs1);
  const double t2 = first.lambda * advection(mesh, second.u, first.u, X, &abs2);
  const double t4 = first.u.dot(*deformation * second.u);
  double abs3 = 0.0;
  for (std::size_t i = 0; i < tu.size(); ++i) {
    abs3 += std::abs(tu[i].psi * tv[i].psi * field_at(X, tu[i].point.x));
  }
  abs3 *= gamma_sq(s);
  const double abs4 = first.u.cwiseAbs().dot(deformation->cwiseAbs() * second.u.cwiseAbs());
  r.terms = {{"mu_u'Xv", t1}, {"lambda_v'Xu", t2}, {"boundary", boundary}, {"deformation", t4}};
  r.lhs = boundary;
  r.rhs = -(t1 + t2 + t4);
  const double sum = t1 + t2 + boundary + t4;
  // Scaled by the absolute size of each contribution: for symmetric pairs the
  // signed terms can all vanish together.
  const double scale = std::max({std::abs(second.lambda) * abs1, std::abs(first.lambda) * abs2, abs3, abs4, 1e-30});
  r.abs_residual = std::abs(sum);
  r.rel_residual = std::abs(sum) / scale;
  return r;
}

PohozaevReport l2_identity_check(const Mesh1D& mesh, double s, const EigenPair& pair, TraceWindow window) {
  PohozaevReport r;
  r.identity = Identity::kL2Radial;
  r.n = mesh.n_per_interval();
  r.s = s;
  r.traces = all_traces(mesh, pair.u, s, window);
  double boundary = 0.0;
  for (const auto& t : r.traces) boundary += t.psi * t.psi * t.point.x * t.point.normal;
  const Matrix M = assemble_mass(mesh);
  r.lhs = pair.u.dot(M * pair.u);
  r.rhs = gamma_sq(s) / (2.0 * s * pair.lambda) * boundary;
  r.terms = {{"l2", r.lhs}, {"trace", r.rhs}};
  finish(r);
  return r;
}

PohozaevReport lemma21_check(const std::function<double(double)>& U, const std::function<double(double)>& dU,
                             Interval support, const Domain1D& domain, const VectorField& X, double s,
                             Lemma21Options opt) {
  if (X.dim() != 1) throw DimensionMismatchError("lemma check needs a one-dimensional field");
  if (!(support.b > support.a)) throw ArgumentError("empty bump support");
  bool inside = false;
  for (const auto& iv : domain.intervals()) {
    if (support.a >= iv.a + opt.margin && support.b <= iv.b - opt.margin) inside = true;
  }
  if (!inside) throw SupportError("bump support must stay " + std::to_string(opt.margin) + " inside the domain");
  const auto [lo, hi] = X.box().ranges[0];
  if (lo > support.a || hi < support.b) throw ArgumentError("field box must contain the bump support");
  if (!(opt.tol > 0.0)) throw ArgumentError("tolerance must be positive");

  const double c = fractional_constant(1, s);
  const double a = support.a;
  const double b = support.b;
  const double L = b - a;
  const detail::DeformationNumerator g(X, s);
  const double inner_tol = 0.1 * opt.tol;

  // Tolerances are absolute against a cancellation-free bound on I(r):
  // |I(r)| <= G min(r^2 int U'^2, 2 int U^2). Relative ones never settle when
  // the kernel numerator vanishes identically (quadratic X at s = 1/2).
  const double UU = quad::adaptive([&](double x) { return U(x) * U(x); }, a, b, 1e-10);
  const double DD = quad::adaptive([&](double x) { return dU(x) * dU(x); }, a, b, 1e-10);
  double sup_dX = 0.0;
  for (int i = 0; i <= 400; ++i) sup_dX = std::max(sup_dX, std::abs(X.derivative1(lo + (hi - lo) * i / 400.0)));
  const double G = (3.0 + 2.0 * s) * std::max(sup_dX, 1e-300);
  auto bound = [&](double r) { return G * std::min(r * r * DD, 2.0 * UU); };

  // I(r) = int (U(x+r) - U(x))^2 g(x, x+r) dx over x in [a - r, b].
  auto I = [&](double r) {
    std::vector<double> pts = {a - r, b};
    for (double p : {a, b - r}) {
      if (p > a - r && p < b) pts.push_back(p);
    }
    for (double p : {lo - r, hi - r, lo, hi}) {
      if (p > a - r && p < b) pts.push_back(p);
    }
    std::sort(pts.begin(), pts.end());
    double sum = 0.0;
    // For tiny r the midpoint derivative avoids cancellation in U(x+r) - U(x).
    const bool tiny = r < 1e-6 * L;
    auto f = [&](double x) {
      const double d = tiny ? r * dU(x + 0.5 * r) : U(x + r) - U(x);
      return d * d * g(g.sample(x), g.sample(x + r));
    };
    const double piece_tol = inner_tol * bound(r) / static_cast<double>(pts.size());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      if (pts[i + 1] > pts[i]) sum += quad::adaptive_abs(f, pts[i], pts[i + 1], piece_tol, nullptr, 20);
    }
    return sum;
  };

  // r in [0, L] with r = L t^{1/(1-s)} removes the r^{1-2s} behaviour at 0.
  const double q = 1.0 / (1.0 - s);
  const double near_scale = G * DD * std::pow(L, 2.0 - 2.0 * s) / (2.0 - 2.0 * s);
  const double near = quad::adaptive_abs(
      [&](double t) {
        if (t <= 0.0) return 0.0;
        const double r = L * std::pow(t, q);
        return I(r) * std::pow(r, -1.0 - 2.0 * s) * L * q * std::pow(t, q - 1.0);
      },
      0.0, 1.0, 0.5 * opt.tol * near_scale, nullptr, 20);
  const double Rt = std::max({L, hi - a, b - lo});
  std::vector<double> rb = {L, Rt};
  for (double p : {hi - b, hi - a, b - lo, a - lo}) {
    if (p > L && p < Rt) rb.push_back(p);
  }
  std::sort(rb.begin(), rb.end());
  const double mid_scale = G * 2.0 * UU * std::pow(L, -2.0 * s) / (2.0 * s);
  double mid = 0.0;
  for (std::size_t i = 0; i + 1 < rb.size(); ++i) {
    if (rb[i + 1] > rb[i]) {
      mid += quad::adaptive_abs([&](double r) { return I(r) * std::pow(r, -1.0 - 2.0 * s); }, rb[i], rb[i + 1],
                                0.5 * opt.tol * mid_scale / static_cast<double>(rb.size()), nullptr, 20);
    }
  }
  // Beyond Rt the shifted bump sees the frozen field: closed form in r.
  const double A = 2.0 * quad::adaptive([&](double x) { return U(x) * U(x) * X.derivative1(x); }, a, b, inner_tol);
  const double B = UU * (X.value1(hi) - X.value1(lo));
  const double tail = A * std::pow(Rt, -2.0 * s) / (2.0 * s) - B * std::pow(Rt, -1.0 - 2.0 * s);
  const double lhs = c * (near + mid + tail);

  double sup = 0.0;
  for (int i = 0; i <= 200; ++i) sup = std::max(sup, std::abs(U(a + L * i / 200.0)));
  FracLapOptions fo;
  fo.R = L * (1.0 + 1e-9);
  fo.tol = 0.1 * opt.tol * std::max(sup, 1e-300);
  fo.support = support;
  fo.panel = std::min(1.0, L);
  double l1 = 0.0;
  const double integral = quad::adaptive(
      [&](double x) {
        const double du = dU(x);
        if (du == 0.0) return 0.0;
        return du * X.value1(x) * frac_laplacian_pointwise(U, s, x, fo).value;
      },
      a, b, opt.tol, nullptr, 25, &l1);
  const double rhs = -2.0 * integral;

  // Assembly engine on the P1 interpolant over the support.
  const Domain1D sd = Domain1D::make({{a, b}});
  const Mesh1D mesh = Mesh1D::make(sd, opt.interpolant_n, 1.0);
  const Vector Uh = interpolate(mesh, U);
  const double engine = Uh.dot(assemble_deformation(mesh, X, s).matrix * Uh);

  PohozaevReport r;
  r.identity = Identity::kLemma21;
  r.s = s;
  r.n = opt.interpolant_n;
  r.lhs = lhs;
  r.rhs = rhs;
  r.abs_residual = std::abs(lhs - rhs);
  // Normalized by the largest of the two sides and the absolute size of the
  // right-hand integrand, so vanishing identities stay meaningful.
  r.rel_residual = r.abs_residual / std::max({std::abs(lhs), std::abs(rhs), 2.0 * l1, 1e-30});
  r.terms = {{"lhs_direct", lhs}, {"rhs_oracle", rhs}, {"rhs_abs", 2.0 * l1}, {"lhs_interpolant", engine}};
  return r;
}

namespace {

struct Solved {
  Mesh1D mesh;
  std::vector<EigenPair> pairs;
};

Solved solve_on(const Domain1D& domain, double s, int k, SolveSettings st) {
  Mesh1D mesh = Mesh1D::make(domain, st.n, st.beta);
  const AssembledForms f = assemble_forms(mesh, s);
  return {mesh, solve_geig(f.stiffness, f.mass, std::min(k, mesh.dof_count()))};
}

}  // namespace

HadamardReport hadamard_check(const Domain1D& domain, double s, int k, const BoundaryPoint1D& bp, double h,
                              bool even_only, SolveSettings settings, TraceWindow window) {
  if (k < 1) throw ArgumentError("eigenvalue index must be >= 1");
  if (!(h > 0.0)) throw ArgumentError("finite-difference step must be positive");
  const Domain1D plus = domain.with_moved_endpoint(bp, h);
  const Domain1D minus = domain.with_moved_endpoint(bp, -h);

  Mesh1D mesh = Mesh1D::make(domain, settings.n, settings.beta);
  const AssembledForms f = assemble_forms(mesh, s);
  int full_index = k;
  EigenPair pair;
  if (even_only) {
    const auto even = solve_geig_even(mesh, f.stiffness, f.mass, k);
    pair = even[static_cast<std::size_t>(k - 1)];
    const int probe = std::min(2 * k + 2, mesh.dof_count());
    const auto full = solve_geig(f.stiffness, f.mass, probe);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < full.size(); ++j) {
      const double d = std::abs(full[j].lambda - pair.lambda);
      if (d < best) {
        best = d;
        full_index = static_cast<int>(j) + 1;
      }
    }
  } else {
    pair = solve_geig(f.stiffness, f.mass, k)[static_cast<std::size_t>(k - 1)];
  }
  const TraceEstimate t = extract_trace(mesh, pair.u, s, bp, window);
  const double lp = solve_on(plus, s, full_index, settings).pairs[static_cast<std::size_t>(full_index - 1)].lambda;
  const double lm = solve_on(minus, s, full_index, settings).pairs[static_cast<std::size_t>(full_index - 1)].lambda;

  HadamardReport r;
  r.k = k;
  r.point = bp;
  r.lambda = pair.lambda;
  r.psi = t.psi;
  r.fd_slope = (lp - lm) / (2.0 * h);
  r.formula = -gamma_sq(s) * t.psi * t.psi;
  r.rel_error = std::abs(r.fd_slope - r.formula) / std::max(std::abs(r.formula), 1e-30);
  r.h = h;
  r.even_only = even_only;
  r.full_index = full_index;
  return r;
}

DilationReport dilation_check(double R, double s, int k, double h, SolveSettings settings, TraceWindow window) {
  if (!(R > 0.0)) throw ArgumentError("radius must be positive");
  const Domain1D dom = Domain1D::make({{-R, R}});
  double fd = 0.0;
  double formula = 0.0;
  double lambda = 0.0;
  for (const auto& bp : dom.boundary_points()) {
    const HadamardReport hr = hadamard_check(dom, s, k, bp, h, false, settings, window);
    fd += hr.fd_slope;
    formula += hr.formula;
    lambda = hr.lambda;
  }
  DilationReport r;
  r.k = k;
  r.lambda = lambda;
  r.R = R;
  r.fd_sum = fd;
  r.formula_sum = formula;
  r.scaling = -2.0 * s * lambda / R;
  r.fd_rel_error = std::abs(fd - r.scaling) / std::abs(r.scaling);
  r.formula_rel_error = std::abs(formula - r.scaling) / std::abs(r.scaling);
  return r;
}

SpectrumReport spectrum_report(const std::vector<double>& lambdas, int components, bool even_only,
                               double cluster_tol) {
  SpectrumReport r;
  r.lambdas = lambdas;
  r.components = components;
  r.even_only = even_only;
  for (std::size_t i = 0; i + 1 < lambdas.size(); ++i) r.gaps.push_back((lambdas[i + 1] - lambdas[i]) / lambdas[i]);
  int size = lambdas.empty() ? 0 : 1;
  for (double gap : r.gaps) {
    if (gap < cluster_tol) {
      ++size;
    } else {
      r.cluster_sizes.push_back(size);
      size = 1;
    }
  }
  if (size > 0) r.cluster_sizes.push_back(size);
  r.max_cluster = r.cluster_sizes.empty() ? 0 : *std::max_element(r.cluster_sizes.begin(), r.cluster_sizes.end());
  if (!even_only) {
    r.note = "simplicity is asserted for the even (radial) subsequence only; full-spectrum gaps are informational";
  } else {
    r.note = "multiplicity bound: clusters of size at most " + std::to_string(components);
  }
  return r;
}

SpectrumReport spectrum_report(const Domain1D& domain, double s, int k_max, bool even_only, double cluster_tol,
                               SolveSettings settings) {
  const Mesh1D mesh = Mesh1D::make(domain, settings.n, settings.beta);
  const AssembledForms f = assemble_forms(mesh, s);
  std::vector<EigenPair> pairs;
  if (even_only) {
    const auto red = restrict_even(mesh, f.stiffness, f.mass);
    if (k_max > red.A.rows()) throw ArgumentError("k_max exceeds the even-subspace dimension");
    pairs = solve_geig(red.A, red.M, k_max);
  } else {
    pairs = solve_geig(f.stiffness, f.mass, k_max);
  }
  std::vector<double> lambdas;
  for (const auto& p : pairs) lambdas.push_back(p.lambda);
  return spectrum_report(lambdas, static_cast<int>(domain.size()), even_only, cluster_tol);
}

}  // namespace fraclab
