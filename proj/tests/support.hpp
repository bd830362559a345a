#pragma once

// Shared deterministic generators for the property suites. Everything is
// seeded explicitly; there is no global random state.

#include <random>
#include <vector>

#include "qtc/qtc.hpp"

namespace qtc::test {

using Rng = std::mt19937_64;

inline Matrix random_matrix(Index d, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(d, d);
  for (Index r = 0; r < d; ++r)
    for (Index c = 0; c < d; ++c) m(r, c) = Complex(g(rng), g(rng));
  return m;
}

inline Vector random_ket(Index d, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(d);
  do {
    for (Index i = 0; i < d; ++i) v(i) = Complex(g(rng), g(rng));
  } while (v.norm() < 1e-6);
  return v / v.norm();
}

inline Matrix random_unitary(Index d, Rng& rng) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(d, rng));
  Matrix q = qr.householderQ();
  return q;
}

inline Matrix random_psd(Index d, Rng& rng) {
  const Matrix a = random_matrix(d, rng);
  return a * a.adjoint();
}

// PSD operator normalized to unit trace.
inline Matrix random_density(Index d, Rng& rng) {
  Matrix p = random_psd(d, rng);
  return p / p.trace().real();
}

inline Subspace random_subspace(Index d, Index k, Rng& rng) {
  Matrix cols(d, k);
  for (Index c = 0; c < k; ++c) cols.col(c) = random_ket(d, rng);
  return Subspace::from_span(d, cols);
}

inline Matrix psd_sqrt(const Matrix& psd) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(psd));
  Eigen::VectorXd vals = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * vals.asDiagonal() * solver.eigenvectors().adjoint();
}

// Random trace-preserving channel with the given number of Kraus elements:
// Gaussian blocks right-normalized so that sum E_i† E_i = I exactly (up to
// round-off).
inline SuperOperator random_tp_channel(Index d, int kraus_count, Rng& rng) {
  std::vector<Matrix> blocks;
  Matrix s = Matrix::Zero(d, d);
  for (int i = 0; i < kraus_count; ++i) {
    blocks.push_back(random_matrix(d, rng));
    s += blocks.back().adjoint() * blocks.back();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(s));
  const Matrix s_inv_sqrt = solver.eigenvectors() *
                            solver.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                            solver.eigenvectors().adjoint();
  std::vector<Matrix> kraus;
  kraus.reserve(blocks.size());
  for (const Matrix& b : blocks) kraus.push_back(b * s_inv_sqrt);
  return SuperOperator(std::move(kraus), KrausKind::trace_preserving);
}

// Generic (non-projective) measurement: M0 a damped random operator,
// M1 = sqrt(I - M0†M0).
inline Measurement random_measurement(Index d, Rng& rng) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  const Matrix a = random_matrix(d, rng);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(a.adjoint() * a));
  const double scale = std::sqrt(solver.eigenvalues().maxCoeff()) * (1.0 + u(rng));
  const Matrix m0 = a / scale;
  const Matrix m1 = psd_sqrt(Matrix::Identity(d, d) - m0.adjoint() * m0);
  return Measurement(m0, m1);
}

// Projective halt on a single direction: M0 = vv†, M1 = I - vv†. Leaves a
// (d-1)-dimensional continue subspace, which is what makes divergence
// analysis nontrivial.
inline Measurement projective_measurement(const Vector& v) {
  const Vector n = v / v.norm();
  const Matrix m0 = n * n.adjoint();
  return Measurement(m0, Matrix::Identity(v.size(), v.size()) - m0);
}

inline Program random_program(Index d, int m, int kraus_count, Rng& rng) {
  std::vector<SuperOperator> procs;
  for (int i = 0; i < m; ++i) procs.push_back(random_tp_channel(d, kraus_count, rng));
  return Program(std::move(procs), random_measurement(d, rng));
}

// Unitary processes with a rank-1 projective halt.
inline Program random_projective_program(Index d, int m, Rng& rng) {
  std::vector<SuperOperator> procs;
  for (int i = 0; i < m; ++i) procs.push_back(SuperOperator::unitary(random_unitary(d, rng)));
  return Program(std::move(procs), projective_measurement(random_ket(d, rng)));
}

// Program guaranteed to diverge: process 1 is block-unitary on a 2-dim
// subspace orthogonal to the halt direction, so that subspace never meets
// the measurement under the all-ones schedule. The block is returned for
// tests that need states with known zero termination probability.
inline Program random_block_program(Index d, int m, Rng& rng, Subspace* block_out = nullptr) {
  if (d < 3) throw ValidationError("random_block_program: needs d >= 3");
  const Vector halt = random_ket(d, rng);
  const Matrix rest = null_space(halt.adjoint());  // d x (d-1), orthonormal
  Matrix frame(d, d);
  frame.col(0) = rest.col(0);
  frame.col(1) = rest.col(1);
  for (Index c = 2; c < d - 1; ++c) frame.col(c) = rest.col(c);
  frame.col(d - 1) = halt;

  Matrix blockdiag = Matrix::Zero(d, d);
  blockdiag.topLeftCorner(2, 2) = random_unitary(2, rng);
  blockdiag.bottomRightCorner(d - 2, d - 2) = random_unitary(d - 2, rng);
  const Matrix u1 = frame * blockdiag * frame.adjoint();

  std::vector<SuperOperator> procs;
  procs.push_back(SuperOperator::unitary(u1));
  for (int i = 1; i < m; ++i) procs.push_back(SuperOperator::unitary(random_unitary(d, rng)));

  if (block_out) *block_out = Subspace(d, frame.leftCols(2));
  return Program(std::move(procs), projective_measurement(halt));
}

// Subspace equality up to tolerance: equal dimensions and mutual containment.
inline bool same_subspace(const Subspace& a, const Subspace& b, double eps = 1e-8) {
  if (a.dim() != b.dim()) return false;
  return containment_residual(a, b) <= eps && containment_residual(b, a) <= eps;
}

inline ScheduleFragment random_fragment(int m, int max_len, Rng& rng) {
  std::uniform_int_distribution<int> len(0, max_len);
  std::uniform_int_distribution<int> pick(1, m);
  std::vector<int> idx;
  const int n = len(rng);
  idx.reserve(n);
  for (int i = 0; i < n; ++i) idx.push_back(pick(rng));
  return ScheduleFragment(std::move(idx));
}

}  // namespace qtc::test
