#pragma once

#include <utility>
#include <vector>

#include "qtc/subspace.hpp"

namespace qtc {

// A (possibly sub-normalized) quantum state: PSD Hermitian with tr <= 1.
struct DensityOperator {
  Matrix mat;

  DensityOperator() = default;

  explicit DensityOperator(Matrix m, const Tolerance& tol = {}) : mat(std::move(m)) {
    if (mat.rows() != mat.cols()) throw NotSquare("DensityOperator: matrix not square");
    require_finite(mat, "DensityOperator");
    const double scale = guard_scale(mat);
    if (hermitian_deviation(mat) > tol.eps_rank * scale)
      throw NotHermitian("DensityOperator: matrix not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(mat));
    if (solver.eigenvalues().minCoeff() < -10.0 * tol.eps_rank * scale)
      throw NotPSD("DensityOperator: negative eigenvalue");
    if (mat.trace().real() > 1.0 + tol.eps_prob)
      throw ValidationError("DensityOperator: trace exceeds 1");
  }

  // Wraps a matrix known to be a valid state (e.g. the output of a CP map
  // applied to a valid state) without re-validating.
  static DensityOperator unchecked(Matrix m) {
    DensityOperator r;
    r.mat = std::move(m);
    return r;
  }

  static DensityOperator pure(const Vector& ket) {
    const double nrm = ket.norm();
    if (!(nrm > 0.0) || !ket.allFinite())
      throw ValidationError("DensityOperator::pure: zero or non-finite ket");
    const Vector v = ket / nrm;
    return unchecked(v * v.adjoint());
  }

  Index dim() const { return mat.rows(); }
  double trace() const { return mat.trace().real(); }
};

enum class KrausKind {
  trace_preserving,     // sum E_i† E_i = I
  trace_nonincreasing,  // sum E_i† E_i <= I
  general,              // CP map, no sum constraint (e.g. duals)
};

// A completely positive map in Kraus form E(rho) = sum E_i rho E_i†.
struct SuperOperator {
  std::vector<Matrix> kraus;
  KrausKind kind = KrausKind::general;

  SuperOperator() = default;

  SuperOperator(std::vector<Matrix> kraus_ops, KrausKind k, const Tolerance& tol = {})
      : kraus(std::move(kraus_ops)), kind(k) {
    if (kraus.empty()) throw ValidationError("SuperOperator: empty Kraus set");
    const Index d = kraus.front().rows();
    for (const Matrix& e : kraus) {
      if (e.rows() != d || e.cols() != d)
        throw DimensionMismatch("SuperOperator: Kraus elements must be square, same dim");
      require_finite(e, "SuperOperator");
    }
    if (kind == KrausKind::general) return;

    Matrix sum = Matrix::Zero(d, d);
    for (const Matrix& e : kraus) sum += e.adjoint() * e;
    if (kind == KrausKind::trace_preserving) {
      if ((sum - Matrix::Identity(d, d)).norm() > tol.eps_rank * double(d))
        throw ValidationError("SuperOperator: Kraus set is not trace-preserving");
    } else {
      Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(sum));
      if (solver.eigenvalues().maxCoeff() > 1.0 + tol.eps_rank * double(d))
        throw ValidationError("SuperOperator: Kraus set is not trace-nonincreasing");
    }
  }

  Index dim() const { return kraus.empty() ? 0 : kraus.front().rows(); }
  bool trace_preserving() const { return kind == KrausKind::trace_preserving; }

  static SuperOperator identity(Index d) {
    return SuperOperator({Matrix::Identity(d, d)}, KrausKind::trace_preserving);
  }

  static SuperOperator unitary(Matrix u, const Tolerance& tol = {}) {
    return SuperOperator({std::move(u)}, KrausKind::trace_preserving, tol);
  }
};

// Binary termination measurement {M0, M1}; outcome 0 halts, outcome 1
// continues. Completeness M0†M0 + M1†M1 = I is enforced.
struct Measurement {
  Matrix m0, m1;

  Measurement() = default;

  Measurement(Matrix outcome0, Matrix outcome1, const Tolerance& tol = {})
      : m0(std::move(outcome0)), m1(std::move(outcome1)) {
    const Index d = m0.rows();
    if (m0.cols() != d || m1.rows() != d || m1.cols() != d)
      throw DimensionMismatch("Measurement: operators must be square, same dim");
    require_finite(m0, "Measurement");
    require_finite(m1, "Measurement");
    const Matrix sum = m0.adjoint() * m0 + m1.adjoint() * m1;
    if ((sum - Matrix::Identity(d, d)).norm() > tol.eps_rank * double(d))
      throw ValidationError("Measurement: M0†M0 + M1†M1 != I");
  }

  Index dim() const { return m0.rows(); }
};

// Linear extension of the map to arbitrary operators (projectors,
// observables), not just states.
inline Matrix apply_to_operator(const SuperOperator& e, const Matrix& a) {
  if (a.rows() != e.dim() || a.cols() != e.dim())
    throw DimensionMismatch("apply_to_operator: dimension mismatch");
  Matrix out = Matrix::Zero(e.dim(), e.dim());
  for (const Matrix& k : e.kraus) out += k * a * k.adjoint();
  return out;
}

inline DensityOperator apply(const SuperOperator& e, const DensityOperator& rho) {
  return DensityOperator::unchecked(apply_to_operator(e, rho.mat));
}

// Schrodinger-Heisenberg dual: E*(A) = sum E_i† A E_i, so that
// tr(E(rho) A) = tr(rho E*(A)).
inline SuperOperator dual(const SuperOperator& e) {
  std::vector<Matrix> adj;
  adj.reserve(e.kraus.size());
  for (const Matrix& k : e.kraus) adj.push_back(k.adjoint());
  return SuperOperator(std::move(adj), KrausKind::general);
}

namespace detail {

// Single Kraus element with E†E = I: images/pre-images reduce to rotating
// the basis, which also keeps the worked 4-dim walk traces exact.
inline bool is_unitary_channel(const SuperOperator& e, const Tolerance& tol) {
  if (e.kraus.size() != 1) return false;
  const Matrix& u = e.kraus.front();
  return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).norm() <=
         tol.eps_rank * double(u.rows());
}

}  // namespace detail

// Image of a subspace: supp E(P_X).
inline Subspace image_subspace(const SuperOperator& e, const Subspace& x,
                               const Tolerance& tol = {}) {
  if (e.dim() != x.ambient) throw DimensionMismatch("image_subspace: dimension mismatch");
  if (x.dim() == 0) return Subspace::zero(x.ambient);
  if (detail::is_unitary_channel(e, tol))
    return Subspace(x.ambient, e.kraus.front() * x.basis, tol);
  return support(apply_to_operator(e, x.projector()), tol);
}

// Pre-image of a subspace: the maximal Y with E(Y) inside X, computed as
// the kernel of the PSD operator E*(P_{X^perp}). Valid for any CP map,
// including trace-nonincreasing transition maps.
inline Subspace preimage_subspace(const SuperOperator& e, const Subspace& x,
                                  const Tolerance& tol = {}) {
  if (e.dim() != x.ambient) throw DimensionMismatch("preimage_subspace: dimension mismatch");
  if (x.dim() == x.ambient) return Subspace::full(x.ambient);
  if (detail::is_unitary_channel(e, tol))
    return Subspace(x.ambient, e.kraus.front().adjoint() * x.basis, tol);
  const Matrix p_perp = Matrix::Identity(x.ambient, x.ambient) - x.projector();
  const Matrix a = hermitize(apply_to_operator(dual(e), p_perp));
  return Subspace(x.ambient, null_space(a, tol), tol);
}

}  // namespace qtc
