#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include <fraclab/assembly.hpp>
#include <fraclab/errors.hpp>

using namespace fraclab;

namespace {

// Entry E(phi_i, phi_j) of two hats of half-width h whose centres are k*h
// apart, from the Fourier side: |xi|^{2s} |hat phi|^2 cos(k h xi) / pi.
double hat_entry_fourier(double s, double h, int k) {
  auto f = [&](double t) { return std::pow(t, 2 * s - 4) * std::pow(std::sin(t), 4) * std::cos(2.0 * k * t); };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const int panels = 4000;
  double sum = 0.0;
  for (int j = 0; j < panels; ++j) sum += GK::integrate(f, j * std::numbers::pi, (j + 1) * std::numbers::pi, 8, 1e-13);
  // Beyond T only the mean of sin^4 cos(2kt) survives.
  const double mean = k == 0 ? 3.0 / 8 : k == 1 ? -0.25 : k == 2 ? 1.0 / 16 : 0.0;
  const double T = panels * std::numbers::pi;
  sum += mean * std::pow(T, 2 * s - 3) / (3 - 2 * s);
  return std::pow(2.0, 2 * s + 1) / std::numbers::pi * std::pow(h, 1 - 2 * s) * sum;
}

Mesh1D uniform(int n) { return Mesh1D::make(Domain1D::make({{-1, 1}}), n, 1.0); }

}  // namespace

TEST_CASE("P1 mass matrix is exact") {
  const Mesh1D m = uniform(8);
  const Matrix M = assemble_mass(m);
  const double h = 0.25;
  CHECK(M(3, 3) == doctest::Approx(2 * h / 3).epsilon(1e-14));
  CHECK(M(3, 4) == doctest::Approx(h / 6).epsilon(1e-14));
  CHECK(M(0, 2) == 0.0);
  CHECK(M.sum() == doctest::Approx(2.0 - 4 * h / 3).epsilon(1e-13));  // integral of (sum of hats)^2
}

TEST_CASE("stiffness entries match the Fourier representation") {
  const Mesh1D m = uniform(16);
  const double h = 2.0 / 16;
  for (double s : {0.25, 0.5, 0.75}) {
    const Matrix A = assemble_gagliardo(m, s);
    const int i = 7;
    for (int k : {0, 1, 2, 3}) {
      CHECK(A(i, i + k) == doctest::Approx(hat_entry_fourier(s, h, k)).epsilon(2e-8));
    }
  }
  // s = 1/2 diagonal in closed form: (4/pi) int sin^4 t / t^3 dt = 4 ln 2 / pi.
  const Matrix A = assemble_gagliardo(m, 0.5);
  CHECK(A(7, 7) == doctest::Approx(4 * std::numbers::ln2 / std::numbers::pi).epsilon(1e-9));
}

TEST_CASE("stiffness is symmetric positive definite and scales under dilation") {
  const Domain1D d = Domain1D::make({{-1, 1}});
  for (double s : {0.3, 0.7}) {
    const Mesh1D m = Mesh1D::make(d, 32, 2.0);
    const Matrix A = assemble_gagliardo(m, s);
    CHECK((A - A.transpose()).norm() <= 1e-14 * A.norm());
    CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(A).eigenvalues().minCoeff() > 0.0);
    const Mesh1D m3 = Mesh1D::make(d.scaled(3.0), 32, 2.0);
    const Matrix A3 = assemble_gagliardo(m3, s);
    CHECK((A3 - std::pow(3.0, 1 - 2 * s) * A).norm() <= 1e-10 * A3.norm());
  }
}

TEST_CASE("torsion problem converges to the closed-form solution") {
  // (-Delta)^s u = 1 on (-1, 1) is solved by (1 - x^2)^s / Gamma(1 + 2s).
  for (double s : {0.3, 0.5, 0.8}) {
    const double g = std::tgamma(1 + 2 * s);
    const double exact_mean = std::sqrt(std::numbers::pi) * std::tgamma(s + 1) / std::tgamma(s + 1.5) / g;
    double prev = 1.0;
    for (int n : {32, 64, 128}) {
      const Mesh1D m = Mesh1D::make(Domain1D::make({{-1, 1}}), n, 2.0);
      const Matrix A = assemble_gagliardo(m, s);
      const Vector zero = Vector::Zero(m.dof_count());
      const Vector b = load_vector(m, std::span<const double>(zero.data(), zero.size()), [](double) { return 1.0; });
      const Vector u = A.ldlt().solve(b);
      double max_err = 0.0;
      for (int i = 0; i < m.dof_count(); ++i) {
        const double x = m.dof_coordinates()[i];
        max_err = std::max(max_err, std::abs(u(i) - std::pow(1 - x * x, s) / g));
      }
      const double energy_err = std::abs(u.dot(b) - exact_mean) / exact_mean;
      CHECK(max_err < 0.02);
      CHECK(energy_err < prev);
      prev = energy_err;
    }
    CHECK(prev < 2e-3);
  }
}

TEST_CASE("deformation matrix for the identity field is (1 - 2s) times the stiffness") {
  const Mesh1D m = Mesh1D::make(Domain1D::make({{-1, 1}}), 32, 2.0);
  const VectorField id = VectorField::identity(1, Box{{{-2, 2}}});
  for (double s : {0.25, 0.5, 0.75}) {
    const Matrix A = assemble_gagliardo(m, s);
    const Matrix B = assemble_deformation(m, id, s).matrix;
    CHECK((B - (1 - 2 * s) * A).norm() <= 1e-10 * A.norm());
  }
  const VectorField c = VectorField::constant({0.7}, Box{{{-2, 2}}});
  CHECK(assemble_deformation(m, c, 0.4).matrix.norm() <= 1e-12);
}

TEST_CASE("deformation matrix is symmetric for a non-affine field") {
  const Mesh1D m = Mesh1D::make(Domain1D::make({{-1, 1}}), 32, 2.0);
  const VectorField X = VectorField::make(1, {Expression::parse("x + 0.25*x^2")}, Box{{{-2, 2}}});
  const Matrix B = assemble_deformation(m, X, 0.5).matrix;
  CHECK((B - B.transpose()).norm() <= 1e-13 * B.norm());
  CHECK_THROWS_AS(assemble_deformation(m, VectorField::identity(1, Box{{{-0.5, 0.5}}}), 0.5), ArgumentError);
}

TEST_CASE("pointwise fractional Laplacian of (1 - x^2)_+^{1+s}") {
  for (double s : {0.25, 0.5, 0.75}) {
    auto phi = [s](double x) { return std::abs(x) < 1 ? std::pow(1 - x * x, 1 + s) : 0.0; };
    const double k = std::pow(4.0, s) * std::tgamma(s + 2) * std::tgamma(s + 0.5) / std::sqrt(std::numbers::pi);
    FracLapOptions opt;
    opt.support = Interval{-1, 1};
    opt.R = 2.5;
    opt.tol = 1e-7;
    for (double x : {0.0, 0.3, -0.6}) {
      const auto v = frac_laplacian_pointwise(phi, s, x, opt);
      CHECK(v.value == doctest::Approx(k * (1 - (1 + 2 * s) * x * x)).epsilon(1e-6));
      CHECK(v.error <= opt.tol);
    }
  }
}

TEST_CASE("pointwise oracle reports unmet tolerances") {
  FracLapOptions opt;
  opt.R = 0.5;  // support not covered and no decay bound small enough
  opt.tol = 1e-12;
  CHECK_THROWS_AS(frac_laplacian_pointwise([](double) { return 1.0; }, 0.5, 0.0, opt), ToleranceError);
}

TEST_CASE("matrix export format") {
  Matrix m(2, 2);
  m << 1.0, 0.1, 0.1, 2.0;
  std::ostringstream os;
  write_matrix(os, m);
  CHECK(os.str().rfind("2 2\n", 0) == 0);
  CHECK(os.str().find("0.10000000000000001") != std::string::npos);
}
