#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include <fraclab/errors.hpp>
#include <fraclab/fields.hpp>

using namespace fraclab;

namespace {

// Written with tgamma rather than lgamma, as an independent check.
double c_ref(int N, double s) {
  return std::pow(std::numbers::pi, -0.5 * N) * s * std::pow(4.0, s) * std::tgamma(0.5 * N + s) / std::tgamma(1.0 - s);
}

Box square(double r) { return Box{{{-r, r}, {-r, r}}}; }

}  // namespace

TEST_CASE("normalization constant") {
  CHECK(fractional_constant(1, 0.5) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-15));
  for (int N : {1, 2, 3}) {
    for (double s : {0.05, 0.25, 0.5, 0.75, 0.95}) {
      CHECK(fractional_constant(N, s) == doctest::Approx(c_ref(N, s)).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(fractional_constant(1, 1.0), ArgumentError);
  CHECK_THROWS_AS(fractional_constant(0, 0.5), ArgumentError);
}

TEST_CASE("kernel vanishes for constant fields and rotations") {
  const VectorField c = VectorField::constant({0.3, -1.2}, square(3));
  const VectorField rot = VectorField::make(2, {Expression::parse("-y"), Expression::parse("x")}, square(3));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    const double x[2] = {u(rng), u(rng)};
    const double y[2] = {u(rng), u(rng)};
    const double scale = fractional_constant(2, 0.4) * std::pow(std::hypot(x[0] - y[0], x[1] - y[1]), -2.8);
    CHECK(std::abs(eval_kernel_KX(c, 0.4, 2, x, y)) <= 1e-12 * scale);
    CHECK(std::abs(eval_kernel_KX(rot, 0.4, 2, x, y)) <= 1e-12 * scale);
  }
}

TEST_CASE("kernel of the identity field") {
  const VectorField id = VectorField::identity(1, Box{{{-5, 5}}});
  for (double s : {0.2, 0.5, 0.8}) {
    const double x[1] = {0.3};
    const double y[1] = {-0.45};
    const double expect = 0.5 * c_ref(1, s) * (1 - 2 * s) * std::pow(0.75, -1 - 2 * s);
    CHECK(eval_kernel_KX(id, s, 1, x, y) == doctest::Approx(expect).epsilon(1e-12));
  }
  const double p[1] = {0.1};
  CHECK_THROWS_AS(eval_kernel_KX(id, 0.5, 1, p, p), CoincidentPointsError);
}

TEST_CASE("fields are extended by clamping outside their box") {
  const VectorField X = VectorField::make(1, {Expression::parse("x + 0.25*x^2")}, Box{{{-1, 1}}});
  CHECK(X.value1(0.5) == doctest::Approx(0.5625));
  CHECK(X.value1(3.0) == doctest::Approx(X.value1(1.0)));
  CHECK(X.value1(-7.0) == doctest::Approx(X.value1(-1.0)));
  CHECK(X.derivative1(0.5) == doctest::Approx(1.25));
  CHECK(X.derivative1(2.0) == 0.0);
  CHECK(X.divergence_source() == DivergenceSource::kSymbolic);
  CHECK(X.lipschitz() >= 1.5 - 1e-12);
}

TEST_CASE("supplied divergence is checked against the field") {
  const Box b = square(1);
  const VectorField ok = VectorField::make(2, {Expression::parse("x"), Expression::parse("y")}, b, Expression::parse("2"));
  CHECK(ok.divergence_source() == DivergenceSource::kSupplied);
  CHECK_THROWS_AS(VectorField::make(2, {Expression::parse("x"), Expression::parse("y")}, b, Expression::parse("3")),
                  ArgumentError);
  CHECK_THROWS_AS(VectorField::make(2, {Expression::parse("x")}, b), DimensionMismatchError);
  CHECK_THROWS_AS(VectorField::make(1, {Expression::parse("y")}, Box{{{-1, 1}}}), DimensionMismatchError);
}

TEST_CASE("c-condition certificate") {
  const VectorField spiral =
      VectorField::make(2, {Expression::parse("5*x - 4*y"), Expression::parse("5*y + 4*x")}, square(1.5));
  const auto cert = check_c_condition(spiral, spiral.box(), 1000, 11);
  CHECK(cert.pass);
  CHECK(cert.constants[0] == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(cert.seed == 11);

  const VectorField bent = VectorField::make(2, {Expression::parse("x + y^2"), Expression::parse("y")}, square(1));
  CHECK_FALSE(check_c_condition(bent, bent.box(), 1000).pass);
}

TEST_CASE("c1/c2 certificate and threshold") {
  const VectorField X = VectorField::make(2, {Expression::parse("0.5*x"), Expression::parse("y")}, square(2));
  const auto cert = check_c1_c2(X, X.box(), 1000);
  CHECK(cert.pass);
  CHECK(cert.constants[0] == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(cert.constants[1] == doctest::Approx(1.0).epsilon(1e-9));

  // Same seed, same certificate.
  const auto again = check_c1_c2(X, X.box(), 1000);
  CHECK(again.constants == cert.constants);

  for (double s : {0.1, 0.25, 0.4}) CHECK(nonexistence_threshold(1.5, 1.0, 2, s) == doctest::Approx(4.0 / (1 - 2 * s)));
  // The c-condition reduces to the critical exponent 2N/(N-2s).
  CHECK(nonexistence_threshold(3.0, 1.0, 3, 0.5) == doctest::Approx(3.0));
  CHECK_THROWS_AS(nonexistence_threshold(1.5, 1.0, 2, 0.5), RangeError);
  CHECK_THROWS_AS(nonexistence_threshold(0.5, 1.0, 2, 0.1), RangeError);
  CHECK_THROWS_AS(nonexistence_threshold(1.5, 0.0, 2, 0.1), RangeError);
}

TEST_CASE("boundary flux") {
  const ImplicitDomain2D circle{Expression::parse("x^2 + y^2 - 1"), {-1.5, 1.5, -1.5, 1.5}};
  const auto bs = sample_boundary_2d(circle, 64);
  const VectorField id = VectorField::identity(2, square(1.5));
  CHECK(min_flux(id, bs) == doctest::Approx(1.0).epsilon(1e-8));
  const VectorField inward = VectorField::make(2, {Expression::parse("-x"), Expression::parse("-y")}, square(1.5));
  const auto cert = flux_certificate(inward, bs);
  CHECK_FALSE(cert.pass);
  CHECK(*cert.min_flux == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK_THROWS_AS(min_flux(VectorField::identity(1, Box{{{-1, 1}}}), bs), DimensionMismatchError);
}
