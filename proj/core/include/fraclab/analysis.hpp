#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fraclab/assembly.hpp"
#include "fraclab/solve.hpp"

namespace fraclab {

/// Fit window for the boundary trace, as multiples of the boundary element
/// size h_b.
struct TraceWindow {
  double lo = 2.0;
  double hi = 40.0;
};

struct TraceEstimate {
  BoundaryPoint1D point;
  double psi;
  double c1;
  double delta_min;
  double delta_max;
  double residual;  // relative l2 misfit of the model over the window
  int nodes_used;
};

/// Least-squares fit u = psi delta^s (1 + c1 delta) over the window nodes.
TraceEstimate extract_trace(const Mesh1D& mesh, const Vector& u, double s, const BoundaryPoint1D& bp,
                            TraceWindow window = {});

enum class Identity { kGeneralized, kRosOtonSerra, kIbp, kL2Radial, kLemma21 };

const char* to_string(Identity id);

struct PohozaevReport {
  Identity identity;
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_residual = 0.0;
  double rel_residual = 0.0;
  int n = 0;
  double s = 0.0;
  std::vector<std::pair<int, double>> history;
  std::vector<TraceEstimate> traces;
  std::vector<std::pair<std::string, double>> terms;
};

/// Relative residual with the 1e-30 floor used by every report.
double relative_residual(double lhs, double rhs);

struct Nonlinearity {
  enum class Kind { kLinear, kPower };
  Kind kind;
  double value;  // lambda for kLinear, p for kPower

  static Nonlinearity linear(double lambda) { return {Kind::kLinear, lambda}; }
  static Nonlinearity power(double p) { return {Kind::kPower, p}; }
  /// F(t) with F' = f.
  double primitive(double t) const;
};

/// Generalized Pohozaev identity
///   Gamma(1+s)^2 sum_b psi(b)^2 X(b) nu(b) = 2 int F(u) div X - E_X(u, u).
/// `deformation` may be supplied to reuse an assembled matrix for X.
PohozaevReport pohozaev_check(const Mesh1D& mesh, double s, const Vector& u, const VectorField& X,
                              const Nonlinearity& nl, const Matrix* deformation = nullptr, TraceWindow window = {});

/// The X = id special case for an eigenpair: Gamma(1+s)^2 sum psi^2 (b.nu) = 2 s lambda int u^2.
PohozaevReport ros_oton_serra_check(const Mesh1D& mesh, double s, const EigenPair& pair, TraceWindow window = {});

/// Two-function identity
///   mu int (u' X) v + lambda int (v' X) u + Gamma(1+s)^2 sum psi_u psi_v X.nu + E_X(u, v) = 0,
/// reported as the sum against the largest term.
PohozaevReport ibp_check(const Mesh1D& mesh, double s, const EigenPair& first, const EigenPair& second,
                         const VectorField& X, const Matrix* deformation = nullptr, TraceWindow window = {});

/// int u^2 = Gamma(1+s)^2 / (2 s lambda) sum psi^2 (b.nu).
PohozaevReport l2_identity_check(const Mesh1D& mesh, double s, const EigenPair& pair, TraceWindow window = {});

struct Lemma21Options {
  double tol = 1e-6;       // quadrature tolerance for both sides
  int interpolant_n = 256; // elements of the assembly-engine cross-check
  double margin = 0.1;     // required distance between support and the domain boundary
};

/// E_X(U, U) = -2 int U' X (-Delta)^s U for a C^2 bump U supported in `support`.
/// lhs is the direct quadrature of the double integral, rhs the pointwise
/// oracle route; terms carry the assembly-engine value on a P1 interpolant.
PohozaevReport lemma21_check(const std::function<double(double)>& U, const std::function<double(double)>& dU,
                             Interval support, const Domain1D& domain, const VectorField& X, double s,
                             Lemma21Options options = {});

struct SolveSettings {
  int n = 512;
  double beta = 2.0;
};

struct HadamardReport {
  int k;
  BoundaryPoint1D point;
  double lambda;
  double psi;
  double fd_slope;
  double formula;
  double rel_error;
  double h;
  bool even_only;
  int full_index;  // 1-based index of the tracked eigenvalue in the full spectrum
};

/// Finite-difference derivative of lambda_k under outward translation of one
/// endpoint against -Gamma(1+s)^2 psi(bp)^2. With even_only, k counts even
/// eigenfunctions of the symmetric domain and the matching full-spectrum
/// index is tracked on the perturbed domains.
HadamardReport hadamard_check(const Domain1D& domain, double s, int k, const BoundaryPoint1D& bp, double h,
                              bool even_only, SolveSettings settings = {}, TraceWindow window = {});

struct DilationReport {
  int k;
  double lambda;
  double R;
  double fd_sum;        // sum of the finite-difference endpoint slopes
  double formula_sum;   // sum of -Gamma(1+s)^2 psi^2 over both endpoints
  double scaling;       // -2 s lambda / R
  double fd_rel_error;
  double formula_rel_error;
};

/// Sum of both endpoint derivatives on (-R, R) against the scaling law.
DilationReport dilation_check(double R, double s, int k, double h, SolveSettings settings = {},
                              TraceWindow window = {});

struct SpectrumReport {
  std::vector<double> lambdas;
  std::vector<double> gaps;           // (lambda_{k+1} - lambda_k) / lambda_k
  std::vector<int> cluster_sizes;
  int max_cluster = 0;
  int components = 0;
  bool even_only = false;
  std::string note;
};

SpectrumReport spectrum_report(const Domain1D& domain, double s, int k_max, bool even_only, double cluster_tol,
                               SolveSettings settings = {});

SpectrumReport spectrum_report(const std::vector<double>& lambdas, int components, bool even_only,
                               double cluster_tol);

}  // namespace fraclab
