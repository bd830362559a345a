#pragma once

#include "qtc/program.hpp"

namespace qtc {

// Quantum walks on the 4-cycle with an absorbing boundary. Two single-step
// unitaries are available; the nondeterministic combination of both is the
// standard worked example for the termination check.

enum class WalkKind { w1_only, w2_only, nondeterministic };

struct WalkSpec {
  WalkKind which = WalkKind::nondeterministic;
  int absorbing_vertex = 2;
};

inline Matrix walk_w1() {
  const double s = 1.0 / std::sqrt(3.0);
  Matrix w(4, 4);
  w << s, s, 0, -s,
       s, -s, s, 0,
       0, s, s, s,
       s, 0, -s, s;
  return w;
}

inline Matrix walk_w2() {
  const double s = 1.0 / std::sqrt(3.0);
  Matrix w(4, 4);
  w << s, s, 0, s,
       -s, s, -s, 0,
       0, s, s, -s,
       s, 0, -s, -s;
  return w;
}

inline Program build_walk(const WalkSpec& spec = {}, const Tolerance& tol = {}) {
  if (spec.absorbing_vertex < 0 || spec.absorbing_vertex > 3)
    throw ValidationError("build_walk: absorbing vertex must be in 0..3");
  const Vector v = basis_ket(4, spec.absorbing_vertex);
  const Matrix m0 = v * v.adjoint();
  const Matrix m1 = Matrix::Identity(4, 4) - m0;
  Measurement meas(m0, m1, tol);

  std::vector<SuperOperator> procs;
  switch (spec.which) {
    case WalkKind::w1_only:
      procs.push_back(SuperOperator::unitary(walk_w1(), tol));
      break;
    case WalkKind::w2_only:
      procs.push_back(SuperOperator::unitary(walk_w2(), tol));
      break;
    case WalkKind::nondeterministic:
      procs.push_back(SuperOperator::unitary(walk_w1(), tol));
      procs.push_back(SuperOperator::unitary(walk_w2(), tol));
      break;
  }
  return Program(std::move(procs), std::move(meas), tol);
}

}  // namespace qtc
