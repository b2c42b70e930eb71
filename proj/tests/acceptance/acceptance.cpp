// Acceptance suite. One line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <fraclab/analysis.hpp>
#include <fraclab/errors.hpp>

using namespace fraclab;

namespace {

// n = 2048, beta = 2, even subspace, s = 0.5 on (-1, 1). Recorded once.
constexpr double kLambda1Oracle = 1.157773952157954;

const Domain1D kInterval = Domain1D::make({{-1, 1}});
const Domain1D kAnnulus = Domain1D::make({{-2, -1}, {1, 2}});

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Solved {
  Mesh1D mesh;
  AssembledForms forms;
  std::vector<EigenPair> pairs;
};

Solved solve(const Domain1D& d, double s, int n, int k) {
  Mesh1D m = Mesh1D::make(d, n, 2.0);
  AssembledForms f = assemble_forms(m, s);
  auto pairs = solve_geig(f.stiffness, f.mass, k);
  return {std::move(m), std::move(f), std::move(pairs)};
}

void kernel_algebra(Outcome& o) {
  std::mt19937_64 rng(20230607);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst_zero = 0.0;
  double worst_id = 0.0;
  for (int N : {2, 3}) {
    Box box;
    for (int i = 0; i < N; ++i) box.ranges.emplace_back(-3.0, 3.0);
    std::vector<VectorField> zero_fields;
    zero_fields.push_back(VectorField::constant(std::vector<double>(static_cast<std::size_t>(N), 0.8), box));
    for (int i = 0; i < N; ++i) {
      for (int j = i + 1; j < N; ++j) {
        // Y^{ij}(x) = x_i e_j - x_j e_i
        std::vector<Expression> c(static_cast<std::size_t>(N), Expression::constant(0.0));
        c[j] = Expression::variable(i);
        c[i] = -Expression::variable(j);
        zero_fields.push_back(VectorField::make(N, c, box));
      }
    }
    const VectorField id = VectorField::identity(N, box);
    for (double s : {0.3, 0.7}) {
      const double cst = fractional_constant(N, s);
      for (int p = 0; p < 1000; ++p) {
        std::vector<double> x(N), y(N);
        double r2 = 0.0;
        for (int i = 0; i < N; ++i) {
          x[i] = u(rng);
          y[i] = u(rng);
          r2 += (x[i] - y[i]) * (x[i] - y[i]);
        }
        const double base = cst * std::pow(std::sqrt(r2), -N - 2 * s);
        for (const auto& X : zero_fields) worst_zero = std::max(worst_zero, std::abs(eval_kernel_KX(X, s, N, x, y)) / base);
        const double expect = 0.5 * base * (N - 2 * s);
        worst_id = std::max(worst_id, std::abs(eval_kernel_KX(id, s, N, x, y) - expect) / std::abs(expect));
      }
    }
  }
  o.detail << "max |K|/scale (constant, rotations) = " << worst_zero << ", identity rel err = " << worst_id;
  o.require(worst_zero <= 1e-12, "vanishing kernels");
  o.require(worst_id <= 1e-12, "identity kernel");
}

void kernel_formula(Outcome& o) {
  auto U = [](double x) {
    const double w = 1 - 4 * x * x;
    return w > 0 ? w * w * w : 0.0;
  };
  auto dU = [](double x) {
    const double w = 1 - 4 * x * x;
    return w > 0 ? -24 * x * w * w : 0.0;
  };
  const Box box{{{-2, 2}}};
  const std::vector<std::pair<const char*, VectorField>> fields = {
      {"id", VectorField::identity(1, box)},
      {"x+0.25x^2", VectorField::make(1, {Expression::parse("x + 0.25*x^2")}, box)},
      {"const", VectorField::constant({0.7}, box)}};
  double worst = 0.0;
  double slowest = 0.0;
  for (const auto& [name, X] : fields) {
    for (double s : {0.25, 0.5, 0.75}) {
      const auto t0 = std::chrono::steady_clock::now();
      Lemma21Options opt;
      opt.tol = 1e-6;
      const auto r = lemma21_check(U, dU, {-0.5, 0.5}, kInterval, X, s, opt);
      const double dt = seconds_since(t0);
      worst = std::max(worst, r.rel_residual);
      slowest = std::max(slowest, dt);
      o.require(r.rel_residual <= 1e-3, std::string(name) + " s=" + std::to_string(s));
      o.require(dt <= 60.0, std::string(name) + " runtime");
    }
  }
  o.detail << "max rel residual = " << worst << ", slowest case " << slowest << " s";
}

void ros_oton_serra(Outcome& o) {
  for (double s : {0.3, 0.5, 0.7}) {
    const Solved coarse = solve(kInterval, s, 128, 3);
    const Solved fine = solve(kInterval, s, 512, 3);
    for (int k = 0; k < 3; ++k) {
      const double r128 = ros_oton_serra_check(coarse.mesh, s, coarse.pairs[k]).rel_residual;
      const double r512 = ros_oton_serra_check(fine.mesh, s, fine.pairs[k]).rel_residual;
      o.detail << " s=" << s << ",k=" << k + 1 << ":" << r128 << "->" << r512;
      o.require(r512 <= 0.05 && r512 < r128, "s=" + std::to_string(s) + " k=" + std::to_string(k + 1));
    }
  }
}

void generalized_pohozaev(Outcome& o) {
  const VectorField X = VectorField::make(1, {Expression::parse("x + 0.25*x^2")}, Box{{{-2, 2}}});
  double r[2];
  int i = 0;
  for (int n : {128, 512}) {
    const Solved sv = solve(kInterval, 0.5, n, 1);
    r[i++] = pohozaev_check(sv.mesh, 0.5, sv.pairs[0].u, X, Nonlinearity::linear(sv.pairs[0].lambda)).rel_residual;
  }
  o.detail << "n=128: " << r[0] << ", n=512: " << r[1];
  o.require(r[1] <= 0.05 && r[1] < r[0], "residual");
}

void two_function(Outcome& o) {
  const Solved sv = solve(kInterval, 0.5, 512, 2);
  const Box box{{{-2, 2}}};
  const double e1 = ibp_check(sv.mesh, 0.5, sv.pairs[0], sv.pairs[1], VectorField::constant({1.0}, box)).rel_residual;
  const double id = ibp_check(sv.mesh, 0.5, sv.pairs[0], sv.pairs[1], VectorField::identity(1, box)).rel_residual;
  o.detail << "X=e1: " << e1 << ", X=id: " << id;
  o.require(e1 <= 0.05, "X=e1");
  o.require(id <= 0.05, "X=id");
}

void hadamard(Outcome& o) {
  const auto right = kInterval.boundary_points()[1];
  for (int k = 1; k <= 3; ++k) {
    const auto h = hadamard_check(kInterval, 0.5, k, right, 1e-3, false, SolveSettings{512, 2.0});
    const auto d = dilation_check(1.0, 0.5, k, 1e-3, SolveSettings{512, 2.0});
    o.detail << " k=" << k << ": fd/formula " << h.rel_error << ", dilation fd " << d.fd_rel_error << " formula "
             << d.formula_rel_error;
    o.require(h.rel_error <= 0.05, "hadamard k=" + std::to_string(k));
    o.require(d.fd_rel_error <= 0.05 && d.formula_rel_error <= 0.05, "dilation k=" + std::to_string(k));
  }
}

void l2_identity(Outcome& o) {
  const Solved ball = solve(kInterval, 0.5, 512, 1);
  const auto r = l2_identity_check(ball.mesh, 0.5, ball.pairs[0]);
  o.detail << "interval |1-RHS| = " << std::abs(1 - r.rhs);
  o.require(std::abs(1 - r.rhs) <= 0.05, "interval");

  const Solved ann = solve(kAnnulus, 0.5, 512, 2);
  for (int k = 0; k < 2; ++k) {
    const auto a = l2_identity_check(ann.mesh, 0.5, ann.pairs[k]);
    o.detail << ", annulus k=" << k + 1 << " |1-RHS| = " << std::abs(1 - a.rhs);
    o.require(std::abs(1 - a.rhs) <= 0.05, "annulus k=" + std::to_string(k + 1));
    for (const auto& t : a.traces) {
      const double contribution = t.psi * t.psi * t.point.x * t.point.normal;
      const bool outer = std::abs(t.point.x) > 1.5;
      o.require(outer ? contribution > 0 : contribution < 0, "annulus sign pattern");
    }
  }
}

void simplicity(Outcome& o) {
  const auto even = spectrum_report(kInterval, 0.5, 7, true, 1e-4, SolveSettings{512, 2.0});
  double min_gap = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 6; ++k) min_gap = std::min(min_gap, even.gaps[k]);
  const auto two = spectrum_report(kAnnulus, 0.5, 8, false, 1e-4, SolveSettings{512, 2.0});
  o.detail << "min even gap (k<=6) = " << min_gap << ", two-interval max cluster = " << two.max_cluster;
  o.require(min_gap > 1e-2, "even gaps");
  o.require(two.max_cluster <= 2, "cluster size");
}

// Relative distance of the computed threshold from the formula evaluated
// exactly on the same double inputs, in units of its forward rounding bound.
double threshold_deviation(double c1, double c2, int N, double s) {
  using Q = boost::multiprecision::cpp_rational;
  const double p = nonexistence_threshold(c1, c2, N, s);
  const Q den = Q(2) * Q(c1) / Q(c2) - (Q(N) + Q(2) * Q(s));
  const Q exact = Q(2 * N) / den;
  const double rel = std::abs(static_cast<double>((Q(p) - exact) / exact));
  const double u = 0.5 * std::numeric_limits<double>::epsilon();
  const double bound = u * (4 + (2 * c1 / c2 + N + 2 * s) / std::abs(static_cast<double>(den)));
  return rel / bound;
}

void threshold(Outcome& o) {
  double worst = 0.0;
  for (int N : {1, 2, 3}) {
    for (double s : {0.1, 0.25, 0.4, 0.45}) {
      if (2 * s >= N) continue;
      worst = std::max(worst, threshold_deviation(N, 1.0, N, s));
      worst = std::max(worst, threshold_deviation(2.5 * N, 2.5, N, s));
    }
  }
  for (double s : {0.05, 0.1, 0.25, 0.4, 0.49}) worst = std::max(worst, threshold_deviation(1.5, 1.0, 2, s));
  const bool dyadic = nonexistence_threshold(1.5, 1.0, 2, 0.25) == 8.0 && nonexistence_threshold(2, 1, 2, 0.5) == 4.0 &&
                      nonexistence_threshold(1, 1, 1, 0.25) == 4.0;
  o.detail << "max deviation from exact formula = " << worst << " rounding bounds; dyadic cases exact: " << dyadic;
  o.require(worst <= 1.0, "formula");
  o.require(dyadic, "dyadic cases");
}

void certificates(Outcome& o) {
  const Box b2{{{-1.5, 1.5}, {-1.5, 1.5}}};
  const VectorField X2 = VectorField::make(2, {Expression::parse("5*x - 4*y"), Expression::parse("5*y + 4*x")}, b2);
  const auto c = check_c_condition(X2, b2, 2000);
  const ImplicitDomain2D d2{Expression::parse("x^2 + 10*(y^3 + x)^2 - 1"), {-1.5, 1.5, -1.5, 1.5}};
  const double flux = min_flux(X2, sample_boundary_2d(d2, 200));
  o.detail << "rotating field: c = " << c.constants[0] << ", min_flux = " << flux;
  o.require(c.pass && std::abs(c.constants[0] - 5.0) <= 1e-6, "c-condition");
  o.require(flux >= -1e-6, "flux");

  const Box b3{{{-2, 2}, {-2, 2}}};
  const VectorField X3 = VectorField::make(2, {Expression::parse("0.5*x"), Expression::parse("y")}, b3);
  const auto cc = check_c1_c2(X3, b3, 2000);
  o.detail << "; anisotropic field: c1 = " << cc.constants[0] << ", c2 = " << cc.constants[1];
  o.require(std::abs(cc.constants[0] - 1.5) <= 1e-6 && std::abs(cc.constants[1] - 1.0) <= 1e-6, "c1/c2");
}

void eigenvalue_regression(Outcome& o) {
  double l[3];
  int i = 0;
  for (int n : {256, 512, 1024}) {
    const Mesh1D m = Mesh1D::make(kInterval, n, 2.0);
    const AssembledForms f = assemble_forms(m, 0.5);
    l[i++] = solve_geig_even(m, f.stiffness, f.mass, 1)[0].lambda;
  }
  const double order = std::log2((l[0] - l[1]) / (l[1] - l[2]));
  const double extrapolated = l[2] - (l[1] - l[2]) / (std::pow(2.0, order) - 1);
  const double rel = std::abs(extrapolated - kLambda1Oracle) / kLambda1Oracle;
  o.detail.precision(12);
  o.detail << "richardson " << extrapolated << " (order " << order << ") vs oracle " << kLambda1Oracle << ", rel "
           << rel;
  o.require(rel <= 5e-3, "regression");
}

void semilinear(Outcome& o) {
  const Mesh1D m = Mesh1D::make(kInterval, 512, 2.0);
  const AssembledForms f = assemble_forms(m, 0.75);
  const auto sol = solve_semilinear(f, 4.0);
  const auto r = pohozaev_check(m, 0.75, sol.u, VectorField::identity(1, Box{{{-2, 2}}}), Nonlinearity::power(4.0));
  o.detail << "iterations " << sol.iterations << ", residual " << sol.residual << ", pohozaev rel " << r.rel_residual;
  o.require(r.rel_residual <= 0.05, "pohozaev");
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
      {"kernel algebra", kernel_algebra},
      {"kernel formula for bumps", kernel_formula},
      {"Ros-Oton-Serra identity", ros_oton_serra},
      {"generalized Pohozaev, non-affine field", generalized_pohozaev},
      {"two-function identity", two_function},
      {"Hadamard formula and dilation", hadamard},
      {"L2 identity", l2_identity},
      {"simplicity and multiplicity", simplicity},
      {"nonexistence threshold", threshold},
      {"geometry certificates", certificates},
      {"first eigenvalue regression", eigenvalue_regression},
      {"semilinear Pohozaev", semilinear},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    if (!o.pass) ++failed;
    std::printf("%-4s criterion %2zu %-40s %6.1fs  %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                seconds_since(t0), o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
