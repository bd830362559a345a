#pragma once

#include <utility>
#include <vector>

#include "qtc/linalg.hpp"

namespace qtc {

// Counts containment decisions whose residual landed near the cutoff
// (within a factor 10 either side of eps_contain). Such decisions are
// numerically fragile and are surfaced in analysis reports.
struct ContainmentDiagnostics {
  int fragile = 0;
};

// A subspace of C^d, held as an orthonormal basis (columns). The zero
// subspace has an empty (d x 0) basis.
struct Subspace {
  Index ambient = 0;
  Matrix basis;

  Subspace() = default;

  Subspace(Index ambient_dim, Matrix basis_columns, const Tolerance& tol = {})
      : ambient(ambient_dim), basis(std::move(basis_columns)) {
    if (basis.size() == 0 && basis.rows() != ambient) basis.resize(ambient, 0);
    if (basis.rows() != ambient)
      throw DimensionMismatch("Subspace: basis rows != ambient dimension");
    if (basis.cols() > ambient)
      throw ValidationError("Subspace: more basis columns than ambient dimension");
    require_finite(basis, "Subspace");
    if (basis.cols() > 0) {
      const Matrix gram = basis.adjoint() * basis;
      const Matrix eye = Matrix::Identity(basis.cols(), basis.cols());
      if ((gram - eye).norm() > tol.eps_rank * std::max<double>(1.0, std::sqrt(double(basis.cols()))))
        throw ValidationError("Subspace: basis columns are not orthonormal");
    }
  }

  Index dim() const { return basis.cols(); }
  bool is_zero() const { return basis.cols() == 0; }
  bool is_full() const { return basis.cols() == ambient; }

  Matrix projector() const {
    if (dim() == 0) return Matrix::Zero(ambient, ambient);
    return basis * basis.adjoint();
  }

  static Subspace zero(Index ambient_dim) {
    return Subspace(ambient_dim, Matrix(ambient_dim, 0));
  }

  static Subspace full(Index ambient_dim) {
    return Subspace(ambient_dim, Matrix::Identity(ambient_dim, ambient_dim));
  }

  static Subspace line(const Vector& v, const Tolerance& tol = {}) {
    const double nrm = v.norm();
    if (nrm <= tol.eps_rank) return zero(v.size());
    Matrix b(v.size(), 1);
    b.col(0) = v / nrm;
    return Subspace(v.size(), std::move(b), tol);
  }

  // Span of arbitrary (not necessarily independent) column vectors,
  // orthonormalized in column order.
  static Subspace from_span(Index ambient_dim, const Matrix& vectors,
                            const Tolerance& tol = {}) {
    Matrix b(ambient_dim, 0);
    for (Index c = 0; c < vectors.cols(); ++c) {
      if (auto v = orthonormalize_extend(b, vectors.col(c), tol)) {
        b.conservativeResize(Eigen::NoChange, b.cols() + 1);
        b.col(b.cols() - 1) = *v;
      }
    }
    return Subspace(ambient_dim, std::move(b), tol);
  }
};

// Span of the eigenvectors of a PSD operator with eigenvalue above
// eps_rank * max(tr, 1).
inline Subspace support(const Matrix& rho, const Tolerance& tol = {}) {
  EigResult eig = hermitian_eig(rho, tol);
  const Index d = rho.rows();
  if (d > 0 && eig.values(d - 1) < -10.0 * tol.eps_rank * guard_scale(rho))
    throw NotPSD("support: min eigenvalue " + std::to_string(eig.values(d - 1)));

  const double tr = rho.trace().real();
  const double cutoff = tol.eps_rank * std::max(tr, 1.0);
  Index k = 0;
  while (k < d && eig.values(k) > cutoff) ++k;
  return Subspace(d, eig.vectors.leftCols(k), tol);
}

// Lattice supremum: span(x u y). The basis of x is kept as a prefix.
inline Subspace join(const Subspace& x, const Subspace& y, const Tolerance& tol = {}) {
  if (x.ambient != y.ambient) throw DimensionMismatch("join: ambient dimensions differ");
  Matrix b = x.basis;
  for (Index c = 0; c < y.basis.cols(); ++c) {
    if (auto v = orthonormalize_extend(b, y.basis.col(c), tol)) {
      b.conservativeResize(Eigen::NoChange, b.cols() + 1);
      b.col(b.cols() - 1) = *v;
    }
  }
  return Subspace(x.ambient, std::move(b), tol);
}

inline Subspace complement(const Subspace& x) {
  if (x.dim() == 0) return Subspace::full(x.ambient);
  if (x.dim() == x.ambient) return Subspace::zero(x.ambient);
  return Subspace(x.ambient, null_space(x.basis.adjoint()));
}

// Intersection via the double complement (x^perp v y^perp)^perp.
inline Subspace intersect(const Subspace& x, const Subspace& y, const Tolerance& tol = {}) {
  if (x.ambient != y.ambient) throw DimensionMismatch("intersect: ambient dimensions differ");
  return complement(join(complement(x), complement(y), tol));
}

// Worst per-column residual ||(I - P_outer) b_c|| over the columns of
// inner's basis (columns are unit vectors, so the residual is already
// normalized per column).
inline double containment_residual(const Subspace& outer, const Subspace& inner) {
  if (outer.ambient != inner.ambient)
    throw DimensionMismatch("containment_residual: ambient dimensions differ");
  if (inner.dim() == 0) return 0.0;
  Matrix r = inner.basis;
  if (outer.dim() > 0) r -= outer.basis * (outer.basis.adjoint() * inner.basis);
  double worst = 0.0;
  for (Index c = 0; c < r.cols(); ++c) worst = std::max(worst, r.col(c).norm());
  return worst;
}

inline bool contains(const Subspace& outer, const Subspace& inner,
                     const Tolerance& tol = {}, ContainmentDiagnostics* diag = nullptr) {
  const double r = containment_residual(outer, inner);
  if (diag && r > 0.1 * tol.eps_contain && r < 10.0 * tol.eps_contain) ++diag->fragile;
  return r <= tol.eps_contain;
}

// A finite union of subspaces. Canonical form keeps no component inside
// another; the empty list denotes {0}.
struct SubspaceUnion {
  Index ambient = 0;
  std::vector<Subspace> components;

  SubspaceUnion() = default;
  explicit SubspaceUnion(Index ambient_dim) : ambient(ambient_dim) {}
  SubspaceUnion(Index ambient_dim, std::vector<Subspace> comps)
      : ambient(ambient_dim), components(std::move(comps)) {
    for (const Subspace& s : components)
      if (s.ambient != ambient)
        throw DimensionMismatch("SubspaceUnion: component ambient dimension differs");
  }

  bool is_zero() const { return components.empty(); }
};

// Indices of the components that survive canonicalization: zero components
// are dropped, and a component contained in another is dropped (duplicates
// keep the first occurrence).
inline std::vector<std::size_t> canonical_component_indices(
    const std::vector<Subspace>& comps, const Tolerance& tol = {},
    ContainmentDiagnostics* diag = nullptr) {
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    if (comps[i].dim() == 0) continue;
    bool drop = false;
    for (std::size_t j = 0; j < comps.size() && !drop; ++j) {
      if (j == i || comps[j].dim() < comps[i].dim()) continue;
      if (comps[j].dim() == comps[i].dim() && j > i) continue;
      if (contains(comps[j], comps[i], tol, diag)) drop = true;
    }
    if (!drop) kept.push_back(i);
  }
  return kept;
}

inline SubspaceUnion union_canonicalize(const SubspaceUnion& u, const Tolerance& tol = {},
                                        ContainmentDiagnostics* diag = nullptr) {
  std::vector<Subspace> kept;
  for (std::size_t i : canonical_component_indices(u.components, tol, diag))
    kept.push_back(u.components[i]);
  return SubspaceUnion(u.ambient, std::move(kept));
}

// True iff p lies inside some single component. A subspace contained in a
// finite union of subspaces is contained in one of them, so the
// componentwise test is exact.
inline bool union_contains_subspace(const SubspaceUnion& u, const Subspace& p,
                                    const Tolerance& tol = {},
                                    ContainmentDiagnostics* diag = nullptr) {
  if (u.ambient != p.ambient)
    throw DimensionMismatch("union_contains_subspace: ambient dimensions differ");
  if (p.dim() == 0) return true;
  for (const Subspace& q : u.components)
    if (contains(q, p, tol, diag)) return true;
  return false;
}

inline SubspaceUnion union_intersect_subspace(const SubspaceUnion& u, const Subspace& x,
                                              const Tolerance& tol = {},
                                              ContainmentDiagnostics* diag = nullptr) {
  if (u.ambient != x.ambient)
    throw DimensionMismatch("union_intersect_subspace: ambient dimensions differ");
  std::vector<Subspace> parts;
  parts.reserve(u.components.size());
  for (const Subspace& q : u.components) parts.push_back(intersect(q, x, tol));
  SubspaceUnion raw(u.ambient, std::move(parts));
  return union_canonicalize(raw, tol, diag);
}

}  // namespace qtc
