#include "fraclab/solve.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "fraclab/errors.hpp"

namespace fraclab {

namespace {

void fix_sign(Vector& v) {
  const double big = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-3 * big) {
      if (v(i) < 0.0) v = -v;
      return;
    }
  }
}

double positive_part_power(double u, double p) { return u > 0.0 ? std::pow(u, p) : 0.0; }

}  // namespace

std::vector<EigenPair> solve_geig(const Matrix& A, const Matrix& M, int k) {
  if (A.rows() != A.cols() || M.rows() != M.cols() || A.rows() != M.rows()) {
    throw DimensionMismatchError("pencil matrices must be square and of equal size");
  }
  const Eigen::Index n = A.rows();
  if (k < 1 || k > n) throw ArgumentError("requested " + std::to_string(k) + " eigenpairs of a size " +
                                          std::to_string(n) + " pencil");
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw ArgumentError("stiffness matrix is not symmetric");
  }
  Eigen::LLT<Matrix> llt(M);
  if (llt.info() != Eigen::Success) throw NotPositiveDefiniteError("mass matrix is not positive definite");
  const Matrix As = 0.5 * (A + A.transpose());
  const Matrix Ms = 0.5 * (M + M.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(As, Ms, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success) throw ConvergenceError("generalized eigensolver did not converge");
  std::vector<EigenPair> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    Vector v = es.eigenvectors().col(i);
    v /= std::sqrt(v.dot(Ms * v));
    fix_sign(v);
    out.push_back({es.eigenvalues()(i), std::move(v)});
  }
  return out;
}

EvenRestriction restrict_even(const Mesh1D& mesh, const Matrix& A, const Matrix& M) {
  const auto mirror = mesh.mirror_map();
  const int n = mesh.dof_count();
  if (A.rows() != n || M.rows() != n) throw DimensionMismatchError("pencil size does not match the mesh");
  std::vector<int> reps;
  for (int i = 0; i < n; ++i) {
    if (i <= mirror[i]) reps.push_back(i);
  }
  Matrix P = Matrix::Zero(n, static_cast<Eigen::Index>(reps.size()));
  for (std::size_t c = 0; c < reps.size(); ++c) {
    const int i = reps[c];
    P(i, static_cast<Eigen::Index>(c)) = 1.0;
    P(mirror[i], static_cast<Eigen::Index>(c)) = 1.0;
  }
  return {P.transpose() * A * P, P.transpose() * M * P, P};
}

std::vector<EigenPair> solve_geig_even(const Mesh1D& mesh, const Matrix& A, const Matrix& M, int k) {
  const auto r = restrict_even(mesh, A, M);
  auto pairs = solve_geig(r.A, r.M, k);
  for (auto& ep : pairs) {
    ep.u = r.lift * ep.u;
    fix_sign(ep.u);
  }
  return pairs;
}

SemilinearSolution solve_semilinear(const AssembledForms& forms, double p, const SemilinearOptions& opt) {
  const double s = forms.s;
  if (!(p > 2.0)) throw ArgumentError("power exponent must exceed 2");
  if (s < 0.5 && !(p < 2.0 / (1.0 - 2.0 * s))) {
    throw SupercriticalError("exponent " + std::to_string(p) + " is not below the critical exponent " +
                             std::to_string(2.0 / (1.0 - 2.0 * s)));
  }
  const Matrix& A = forms.stiffness;
  const Mesh1D& mesh = forms.mesh;
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success) throw NotPositiveDefiniteError("stiffness matrix is not positive definite");

  auto f = [p](double v) { return positive_part_power(v, p - 1.0); };
  auto power = [p](double v) { return positive_part_power(v, p); };
  auto one = [](double) { return 1.0; };
  auto normalize = [&](Vector w) {
    const double energy = w.dot(A * w);
    const double mass = integrate_density(mesh, std::span<const double>(w.data(), w.size()), power, one);
    if (!(mass > 0.0)) throw ConvergenceError("iterate lost its positive part");
    return Vector(w * std::pow(energy / mass, 1.0 / (p - 2.0)));
  };

  Vector u = normalize(solve_geig(A, forms.mass, 1).front().u);
  int it = 0;
  double change = 0.0;
  for (; it < opt.max_iter; ++it) {
    const Vector b = load_vector(mesh, std::span<const double>(u.data(), u.size()), f);
    const Vector next = normalize(llt.solve(b));
    change = (next - u).cwiseAbs().maxCoeff() / std::max(1e-300, next.cwiseAbs().maxCoeff());
    u = next;
    if (change < opt.tol) break;
  }
  if (!(change < opt.tol)) {
    throw ConvergenceError("semilinear iteration stalled at relative change " + std::to_string(change));
  }
  const std::span<const double> us(u.data(), u.size());
  const Vector Au = A * u;
  const Vector b = load_vector(mesh, us, f);
  const double energy = u.dot(Au);
  const double mass = integrate_density(mesh, us, power, one);
  return {p, u, (Au - b).norm() / Au.norm(), it + 1, std::abs(energy - mass) / energy};
}

}  // namespace fraclab
