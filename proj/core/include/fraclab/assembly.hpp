#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "fraclab/domain.hpp"
#include "fraclab/fields.hpp"

namespace fraclab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct QuadratureInfo {
  int separated_order = 8;     // tensor Gauss-Legendre per separated element pair
  int singular_order = 12;     // Gauss-Jacobi / Gauss-Legendre on touching and identical pairs
  int max_subdivision = 12;    // depth cap for near-pair splitting
  bool include_exterior = true;
  int subdivided_pairs = 0;    // filled in by the assembler
};

/// Mass, Gagliardo stiffness and their metadata on a P1 mesh.
struct AssembledForms {
  Mesh1D mesh;
  double s;
  Matrix mass;
  Matrix stiffness;
  QuadratureInfo quadrature;
};

/// Matrix of the deformation form E_X on the P1 basis.
struct DeformationMatrix {
  Mesh1D mesh;
  double s;
  VectorField field;
  Matrix matrix;
  QuadratureInfo quadrature;
};

Matrix assemble_mass(const Mesh1D& mesh);

/// Gagliardo stiffness (c_{1,s}/2) int int (phi_i(x)-phi_i(y))(phi_j(x)-phi_j(y)) |x-y|^{-1-2s}
/// over the whole plane, including interactions with the exterior.
Matrix assemble_gagliardo(const Mesh1D& mesh, double s, QuadratureInfo* info = nullptr);

AssembledForms assemble_forms(const Mesh1D& mesh, double s, QuadratureInfo info = {});

/// Deformation matrix B_ij = int int (phi_i(x)-phi_i(y))(phi_j(x)-phi_j(y)) K_X(x,y).
DeformationMatrix assemble_deformation(const Mesh1D& mesh, const VectorField& X, double s,
                                       QuadratureInfo info = {});

struct PointwiseValue {
  double value;
  double error;
};

struct FracLapOptions {
  double R = 20.0;                          // truncation radius of the explicit integral
  double tol = 1e-8;                        // absolute tolerance on the returned value
  std::optional<Interval> support;          // phi vanishes outside, when known
  std::optional<double> sup_abs;            // bound on |phi| for the tail estimate
  double panel = 1.0;                       // panel length on [1, R]
};

/// Pointwise (-Delta)^s phi(x) from the second-difference integral.
/// Throws ToleranceError when the estimated error exceeds options.tol.
PointwiseValue frac_laplacian_pointwise(const std::function<double(double)>& phi, double s, double x,
                                        const FracLapOptions& options = {});

/// Sum over elements of order-8 Gauss-Legendre applied to density(u_h(x)) * weight(x).
double integrate_density(const Mesh1D& mesh, std::span<const double> nodal,
                         const std::function<double(double)>& density,
                         const std::function<double(double)>& weight);

/// Load vector b_i = int f(u_h) phi_i dx, same quadrature as integrate_density.
Vector load_vector(const Mesh1D& mesh, std::span<const double> nodal, const std::function<double(double)>& f);

/// P1 nodal values of phi at the degrees of freedom.
Vector interpolate(const Mesh1D& mesh, const std::function<double(double)>& phi);

/// Plain-text export: first line "n n", then rows.
void write_matrix(std::ostream& os, const Matrix& m);

}  // namespace fraclab
