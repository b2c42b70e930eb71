#include <cmath>
#include <numbers>

#include "doctest.h"
#include <fraclab/analysis.hpp>
#include <fraclab/errors.hpp>

using namespace fraclab;

namespace {

struct Bump {
  double operator()(double x) const {
    const double w = 1 - 4 * x * x;
    return w > 0 ? w * w * w : 0.0;
  }
  double d(double x) const {
    const double w = 1 - 4 * x * x;
    return w > 0 ? -24 * x * w * w : 0.0;
  }
};

const Domain1D kInterval = Domain1D::make({{-1, 1}});
const Box kBox{{{-2, 2}}};

PohozaevReport lemma(const VectorField& X, double s, double tol) {
  const Bump U;
  Lemma21Options o;
  o.tol = tol;
  o.interpolant_n = 32;
  return lemma21_check(U, [U](double x) { return U.d(x); }, {-0.5, 0.5}, kInterval, X, s, o);
}

}  // namespace

TEST_CASE("trace of the torsion function") {
  // u = (1 - x^2)^s / Gamma(1 + 2s) has psi(+-1) = 2^s / Gamma(1 + 2s).
  const double s = 0.5;
  const Mesh1D m = Mesh1D::make(kInterval, 256, 2.0);
  Vector u(m.dof_count());
  for (int i = 0; i < m.dof_count(); ++i) {
    const double x = m.dof_coordinates()[i];
    u(i) = std::pow(1 - x * x, s) / std::tgamma(1 + 2 * s);
  }
  for (const auto& bp : kInterval.boundary_points()) {
    const auto t = extract_trace(m, u, s, bp);
    CHECK(t.psi == doctest::Approx(std::pow(2.0, s)).epsilon(1e-6));
    CHECK(t.nodes_used >= 4);
    CHECK(t.residual < 1e-6);
  }
  CHECK_THROWS_AS(extract_trace(m, u, s, kInterval.boundary_points()[0], TraceWindow{2, 3}), WindowError);
}

TEST_CASE("relative residual and primitives") {
  CHECK(relative_residual(1.0, 1.01) == doctest::Approx(0.01 / 1.01));
  CHECK(relative_residual(0.0, 0.0) == 0.0);
  CHECK(Nonlinearity::linear(3.0).primitive(2.0) == doctest::Approx(6.0));
  CHECK(Nonlinearity::power(4.0).primitive(-2.0) == doctest::Approx(4.0));
  CHECK(std::string(to_string(Identity::kRosOtonSerra)) == "ros-oton-serra");
}

TEST_CASE("kernel formula for a compactly supported bump") {
  const VectorField id = VectorField::identity(1, kBox);
  const VectorField quad = VectorField::make(1, {Expression::parse("x + 0.25*x^2")}, kBox);
  for (double s : {0.25, 0.75}) {
    for (const VectorField* X : {&id, &quad}) {
      const auto r = lemma(*X, s, 1e-6);
      CHECK(r.rel_residual < 1e-6);
    }
  }
  // The quadratic part is odd against the even bump, so both fields agree.
  CHECK(lemma(quad, 0.75, 1e-6).lhs == doctest::Approx(lemma(id, 0.75, 1e-6).lhs).epsilon(1e-9));
}

TEST_CASE("kernel formula residual shrinks with the quadrature tolerance") {
  const VectorField id = VectorField::identity(1, kBox);
  for (double s : {0.25, 0.5, 0.75}) {
    const double coarse = lemma(id, s, 1e-1).rel_residual;
    const double fine = lemma(id, s, 1e-2).rel_residual;
    CHECK(fine * 3 <= coarse);
  }
}

TEST_CASE("kernel formula rejects supports near the boundary") {
  const Bump U;
  const VectorField id = VectorField::identity(1, kBox);
  CHECK_THROWS_AS(lemma21_check(U, [U](double x) { return U.d(x); }, {-0.5, 0.95}, kInterval, id, 0.5),
                  SupportError);
}

TEST_CASE("identities on a coarse mesh") {
  const double s = 0.5;
  const Mesh1D m = Mesh1D::make(kInterval, 128, 2.0);
  const AssembledForms f = assemble_forms(m, s);
  const auto pairs = solve_geig(f.stiffness, f.mass, 2);
  const auto ros = ros_oton_serra_check(m, s, pairs[0]);
  CHECK(ros.rel_residual < 0.02);
  CHECK(ros.traces.size() == 2);
  const auto l2 = l2_identity_check(m, s, pairs[0]);
  CHECK(l2.rel_residual < 0.02);
  // Identity field, even against odd: every term vanishes by symmetry.
  const auto ibp = ibp_check(m, s, pairs[0], pairs[1], VectorField::identity(1, kBox));
  CHECK(ibp.rel_residual < 1e-8);
  const auto e1 = ibp_check(m, s, pairs[0], pairs[1], VectorField::constant({1.0}, kBox));
  CHECK(e1.rel_residual < 0.02);
  // Generalized identity with X = id agrees with the Ros-Oton-Serra form.
  const auto gen = pohozaev_check(m, s, pairs[0].u, VectorField::identity(1, kBox), Nonlinearity::linear(pairs[0].lambda));
  CHECK(gen.rel_residual == doctest::Approx(ros.rel_residual).epsilon(1e-6));
}

TEST_CASE("spectrum report from eigenvalues") {
  const auto r = spectrum_report({1.0, 1.00001, 2.0, 3.0}, 2, false, 1e-4);
  CHECK(r.max_cluster == 2);
  CHECK(r.cluster_sizes == std::vector<int>{2, 1, 1});
  CHECK(r.gaps.size() == 3);
  const auto two = spectrum_report(Domain1D::make({{-2, -1}, {1, 2}}), 0.5, 6, false, 1e-4, SolveSettings{64, 2.0});
  CHECK(two.max_cluster <= 2);
}

TEST_CASE("Hadamard derivative on a coarse mesh") {
  const auto r = hadamard_check(kInterval, 0.5, 1, kInterval.boundary_points()[1], 1e-3, false, SolveSettings{128, 2.0});
  CHECK(r.fd_slope < 0.0);
  CHECK(r.rel_error < 0.03);
  CHECK(r.full_index == 1);
}
