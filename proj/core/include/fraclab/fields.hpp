#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fraclab/domain.hpp"
#include "fraclab/expression.hpp"

namespace fraclab {

/// Axis-aligned box in R^N, one (lo, hi) pair per coordinate.
struct Box {
  std::vector<std::pair<double, double>> ranges;
  int dim() const { return static_cast<int>(ranges.size()); }
  bool contains(std::span<const double> x) const;
};

enum class DivergenceSource { kSupplied, kSymbolic, kFiniteDifference };

const char* to_string(DivergenceSource src);

/// Closed-form Lipschitz vector field X: R^N -> R^N.
///
/// The expressions define X on `box`. Outside the box the field is extended
/// by X(P(x)) with P the nearest-point projection onto the box, which keeps
/// X globally Lipschitz with the same constant. Every evaluation, including
/// the derivative, uses this extension.
class VectorField {
 public:
  static VectorField make(int dim, std::vector<Expression> components, Box box,
                          std::optional<Expression> divergence = std::nullopt);

  /// Convenience constructors used throughout tests and tools.
  static VectorField identity(int dim, Box box);
  static VectorField constant(std::vector<double> value, Box box);

  int dim() const { return dim_; }
  const Box& box() const { return box_; }
  double lipschitz() const { return lip_; }
  DivergenceSource divergence_source() const { return div_source_; }
  std::span<const Expression> components() const { return components_; }

  std::vector<double> value(std::span<const double> x) const;
  double divergence(std::span<const double> x) const;
  /// Row-major N x N Jacobian of the (extended) field.
  std::vector<double> jacobian(std::span<const double> x) const;

  /// Scalar fast paths for N = 1.
  double value1(double x) const;
  double derivative1(double x) const;

  /// True when every component is a constant expression.
  bool is_constant() const { return constant_; }

 private:
  VectorField() = default;
  std::vector<double> project(std::span<const double> x, std::vector<bool>* inside) const;
  double raw_divergence(std::span<const double> p) const;

  int dim_ = 0;
  std::vector<Expression> components_;
  std::vector<Expression> jacobian_;  // empty when finite differences are used
  std::optional<Expression> divergence_;
  DivergenceSource div_source_ = DivergenceSource::kSymbolic;
  Box box_;
  double lip_ = 0.0;
  bool constant_ = false;
};

/// Normalization constant c_{N,s} = pi^{-N/2} s 4^s Gamma(N/2+s) / Gamma(1-s).
double fractional_constant(int N, double s);

/// Fractional deformation kernel K_X(x, y).
double eval_kernel_KX(const VectorField& X, double s, int N, std::span<const double> x,
                      std::span<const double> y);

enum class CertificateKind { kCCondition, kC1C2Condition, kFlux };

const char* to_string(CertificateKind kind);

struct ConditionCertificate {
  CertificateKind kind;
  std::vector<double> constants;
  std::optional<double> min_flux;
  int samples = 0;
  std::uint64_t seed = 0;
  bool pass = false;
  DivergenceSource divergence_source = DivergenceSource::kSymbolic;
  std::string note;
};

inline constexpr std::uint64_t kDefaultSeed = 20230607;

/// Sampling certificate for (X(x)-X(y)).(x-y) = c|x-y|^2 together with div X = cN.
ConditionCertificate check_c_condition(const VectorField& X, const Box& box, int m,
                                       std::uint64_t seed = kDefaultSeed);

/// Estimates c1 = min div X and c2 = sup (X(x)-X(y)).(x-y)/|x-y|^2 on the box.
ConditionCertificate check_c1_c2(const VectorField& X, const Box& box, int m,
                                 std::uint64_t seed = kDefaultSeed);

/// Critical exponent p* above which the supercritical problem has no
/// nontrivial solution: 2N / (2 c1/c2 - (N + 2s)).
double nonexistence_threshold(double c1, double c2, int N, double s);

/// Minimum of X . nu over boundary samples.
double min_flux(const VectorField& X, std::span<const BoundarySample2D> boundary);

ConditionCertificate flux_certificate(const VectorField& X, std::span<const BoundarySample2D> boundary,
                                      double tolerance = 1e-6);

}  // namespace fraclab
