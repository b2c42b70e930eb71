#pragma once

#include <vector>

#include "fraclab/assembly.hpp"

namespace fraclab {

struct EigenPair {
  double lambda;
  Vector u;  // M-normalized
};

/// Lowest k eigenpairs of A u = lambda M u in ascending order. Eigenvectors
/// are M-orthonormal; the sign is fixed so the first component that is
/// significant (above 1e-3 of the largest) is positive.
std::vector<EigenPair> solve_geig(const Matrix& A, const Matrix& M, int k);

/// Pencil restricted to mirror-symmetric nodal vectors. `lift` maps reduced
/// coordinates back to full nodal vectors.
struct EvenRestriction {
  Matrix A;
  Matrix M;
  Matrix lift;
};

EvenRestriction restrict_even(const Mesh1D& mesh, const Matrix& A, const Matrix& M);

/// Eigenpairs restricted to the even subspace, lifted to full nodal vectors.
std::vector<EigenPair> solve_geig_even(const Mesh1D& mesh, const Matrix& A, const Matrix& M, int k);

struct SemilinearSolution {
  double p;
  Vector u;
  double residual;   // ||A u - b(u)|| / ||A u||
  int iterations;
  double nehari_gap; // |u^T A u - int u_+^p| / u^T A u
};

struct SemilinearOptions {
  double tol = 1e-10;
  int max_iter = 500;
};

/// Positive ground state of the power nonlinearity f(u) = u_+^{p-1} by
/// Nehari-normalized fixed-point iteration, started from the first
/// eigenvector.
SemilinearSolution solve_semilinear(const AssembledForms& forms, double p, const SemilinearOptions& options = {});

}  // namespace fraclab
