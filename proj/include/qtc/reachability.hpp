#pragma once

#include "qtc/program.hpp"

namespace qtc {

struct ReachabilityStats {
  int residual_computations = 0;
  int kraus_count = 0;
};

// Worklist computation of the reachable space from rho: starting from an
// orthonormal basis of supp(rho), each basis vector b_i is pushed through
// every Kraus element E_j of the averaged transition and the orthonormal
// residual, when nonzero, extends the basis. FIFO over basis vectors,
// Kraus index ascending, so runs are reproducible step by step.
inline Subspace reachable_space(const Program& p, const DensityOperator& rho,
                                const Tolerance& tol = {},
                                ReachabilityStats* stats = nullptr) {
  if (rho.dim() != p.dim) throw DimensionMismatch("reachable_space: state dimension mismatch");
  const TransitionOp tbar = averaged_transition(p, tol);
  if (stats) stats->kraus_count = static_cast<int>(tbar.kraus.size());

  Matrix basis = support(rho.mat, tol).basis;
  Index i = 0;
  while (i < basis.cols()) {
    for (const Matrix& e : tbar.kraus) {
      const Vector candidate = e * basis.col(i);
      if (stats) ++stats->residual_computations;
      if (auto v = orthonormalize_extend(basis, candidate, tol)) {
        basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
        basis.col(basis.cols() - 1) = *v;
      }
    }
    ++i;
  }
  return Subspace(p.dim, std::move(basis), tol);
}

struct FixpointResult {
  Subspace space;
  int iterations = 0;  // smallest n with X_n = X_{n+1}
};

// Independent characterization of the reachable space as the least fixpoint
// of X -> X v T(X) above supp(rho). The chain is increasing inside a
// finite-dimensional space, so equal dimensions mean equal spaces.
inline FixpointResult reachable_space_fixpoint_oracle(const Program& p,
                                                      const DensityOperator& rho,
                                                      const Tolerance& tol = {}) {
  if (rho.dim() != p.dim)
    throw DimensionMismatch("reachable_space_fixpoint_oracle: state dimension mismatch");
  const TransitionOp tbar = averaged_transition(p, tol);
  Subspace x = support(rho.mat, tol);
  int n = 0;
  for (;;) {
    Subspace next = join(x, image_subspace(tbar, x, tol), tol);
    if (next.dim() == x.dim()) break;
    x = std::move(next);
    ++n;
  }
  return {std::move(x), n};
}

}  // namespace qtc
