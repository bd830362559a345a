#pragma once

#include <optional>
#include <utility>

#include "qtc/core.hpp"

namespace qtc {

// Spectral decomposition of a Hermitian matrix, eigenvalues descending,
// eigenvectors as matching columns.
struct EigResult {
  Eigen::VectorXd values;
  Matrix vectors;
};

// Hermitian eigendecomposition. The input is symmetrized ((m + m†)/2)
// before decomposition to absorb round-off; inputs that deviate from
// Hermitian by more than eps_rank relative to scale are rejected.
inline EigResult hermitian_eig(const Matrix& m, const Tolerance& tol = {}) {
  if (m.rows() != m.cols())
    throw NotSquare("hermitian_eig: matrix is " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()));
  require_finite(m, "hermitian_eig");
  if (hermitian_deviation(m) > tol.eps_rank * guard_scale(m))
    throw NotHermitian("hermitian_eig: deviation " + std::to_string(hermitian_deviation(m)));

  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(m));
  if (solver.info() != Eigen::Success)
    throw Error("hermitian_eig: eigensolver failed to converge");

  EigResult r;
  r.values = solver.eigenvalues().reverse();
  r.vectors = solver.eigenvectors().rowwise().reverse();
  return r;
}

// One Gram-Schmidt extension step: the residual of `candidate` against the
// orthonormal columns of `basis`, normalized, or nothing when the candidate
// is already spanned. Zero test: ||residual|| <= eps_rank * (1 + ||candidate||).
inline std::optional<Vector> orthonormalize_extend(const Matrix& basis,
                                                   const Vector& candidate,
                                                   const Tolerance& tol = {}) {
  if (basis.cols() > 0 && basis.rows() != candidate.size())
    throw DimensionMismatch("orthonormalize_extend: basis rows != candidate size");
  require_finite(candidate, "orthonormalize_extend");

  Vector r = candidate;
  if (basis.cols() > 0) {
    r -= basis * (basis.adjoint() * r);
    r -= basis * (basis.adjoint() * r);  // second pass firms up orthogonality
  }
  const double nrm = r.norm();
  if (nrm <= tol.eps_rank * (1.0 + candidate.norm())) return std::nullopt;
  return Vector(r / nrm);
}

// Orthonormal basis (columns) of { v : ||m v|| <= eps_rank * ||m|| }.
// m may be rectangular; a matrix whose largest singular value is below
// eps_rank is treated as zero and yields the full space.
inline Matrix null_space(const Matrix& m, const Tolerance& tol = {}) {
  const Index n = m.cols();
  require_finite(m, "null_space");
  if (n == 0) return Matrix(0, 0);
  if (m.rows() == 0 || m.norm() == 0.0) return Matrix::Identity(n, n);

  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(0) <= tol.eps_rank) return Matrix::Identity(n, n);
  const double cutoff = tol.eps_rank * sv(0);
  Index rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

}  // namespace qtc
