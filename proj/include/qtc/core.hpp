#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qtc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

// Numerical cutoffs used throughout the analysis.
//   eps_rank    - zero test for singular values / eigenvalues / residuals
//   eps_contain - residual cutoff for subspace containment
//   eps_prob    - probability comparisons
// Containment logic assumes eps_contain >= eps_rank.
struct Tolerance {
  double eps_rank = 1e-9;
  double eps_contain = 1e-8;
  double eps_prob = 1e-9;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotSquare : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public Error {
 public:
  using Error::Error;
};

class NotPSD : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class SearchSpaceTooLarge : public Error {
 public:
  using Error::Error;
};

class NoDivergingStep : public Error {
 public:
  using Error::Error;
};

inline void validate_tolerance(const Tolerance& tol) {
  if (!(tol.eps_rank > 0.0) || !(tol.eps_contain > 0.0) || !(tol.eps_prob > 0.0))
    throw ValidationError("tolerances must be strictly positive");
  if (tol.eps_contain < tol.eps_rank)
    throw ValidationError("eps_contain must be >= eps_rank");
}

// Frobenius norm floored at 1; scale factor for hermiticity/PSD guards so
// that operators below resolution are treated as zero rather than rejected.
inline double guard_scale(const Matrix& m) { return std::max(m.norm(), 1.0); }

inline Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

inline double hermitian_deviation(const Matrix& m) {
  return (m - m.adjoint()).norm();
}

inline Vector basis_ket(Index dim, Index i) {
  Vector v = Vector::Zero(dim);
  v(i) = Complex(1.0, 0.0);
  return v;
}

inline void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw ValidationError(std::string(what) + ": non-finite entries");
}

}  // namespace qtc
