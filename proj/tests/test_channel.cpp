#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace qtc;
using Catch::Approx;

TEST_CASE("DensityOperator validation") {
  REQUIRE_NOTHROW(DensityOperator(Matrix::Identity(2, 2) * 0.5));
  Matrix skew = Matrix::Zero(2, 2);
  skew(0, 1) = 1.0;
  REQUIRE_THROWS_AS(DensityOperator(skew), NotHermitian);
  Matrix neg = Matrix::Zero(2, 2);
  neg(0, 0) = 1.0;
  neg(1, 1) = -0.2;
  REQUIRE_THROWS_AS(DensityOperator(neg), NotPSD);
  REQUIRE_THROWS_AS(DensityOperator(Matrix::Identity(2, 2) * 0.8), ValidationError);
  const DensityOperator p = DensityOperator::pure(2.0 * basis_ket(3, 1));
  REQUIRE(p.trace() == Approx(1.0).margin(1e-12));
}

TEST_CASE("SuperOperator validation") {
  test::Rng rng(3001);
  REQUIRE_NOTHROW(SuperOperator::unitary(test::random_unitary(3, rng)));
  // a contraction is not trace-preserving
  REQUIRE_THROWS_AS(SuperOperator({Matrix::Identity(2, 2) * 0.5}, KrausKind::trace_preserving),
                    ValidationError);
  REQUIRE_NOTHROW(SuperOperator({Matrix::Identity(2, 2) * 0.5}, KrausKind::trace_nonincreasing));
  REQUIRE_THROWS_AS(SuperOperator({Matrix::Identity(2, 2) * 1.5}, KrausKind::trace_nonincreasing),
                    ValidationError);
  REQUIRE_THROWS_AS(SuperOperator({}, KrausKind::general), ValidationError);
}

TEST_CASE("Measurement validation") {
  const Vector v = basis_ket(2, 0);
  const Matrix m0 = v * v.adjoint();
  REQUIRE_NOTHROW(Measurement(m0, Matrix::Identity(2, 2) - m0));
  REQUIRE_THROWS_AS(Measurement(m0, Matrix::Identity(2, 2)), ValidationError);
}

TEST_CASE("apply: identity channel and unitary step") {
  test::Rng rng(3002);
  const Matrix rho = test::random_density(3, rng);
  const DensityOperator out = apply(SuperOperator::identity(3), DensityOperator(rho));
  REQUIRE((out.mat - rho).norm() < 1e-14);

  // one walk step from |0><0| puts weight 1/3 on vertices 0, 1, 3
  const Matrix w1 = [] {
    const double s = 1.0 / std::sqrt(3.0);
    Matrix w(4, 4);
    w << s, s, 0, -s, s, -s, s, 0, 0, s, s, s, s, 0, -s, s;
    return w;
  }();
  const DensityOperator stepped =
      apply(SuperOperator::unitary(w1), DensityOperator::pure(basis_ket(4, 0)));
  REQUIRE(stepped.mat(0, 0).real() == Approx(1.0 / 3.0).margin(1e-12));
  REQUIRE(stepped.mat(1, 1).real() == Approx(1.0 / 3.0).margin(1e-12));
  REQUIRE(stepped.mat(2, 2).real() == Approx(0.0).margin(1e-12));
  REQUIRE(stepped.mat(3, 3).real() == Approx(1.0 / 3.0).margin(1e-12));
}

TEST_CASE("apply preserves trace and positivity on random channels") {
  test::Rng rng(3003);
  for (int trial = 0; trial < 100; ++trial) {
    const Index d = 2 + trial % 3;
    const SuperOperator e = test::random_tp_channel(d, 2, rng);
    const Matrix rho = test::random_density(d, rng);
    const DensityOperator out = apply(e, DensityOperator(rho));
    REQUIRE(out.trace() == Approx(1.0).margin(1e-12));
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(out.mat));
    REQUIRE(solver.eigenvalues().minCoeff() >= -1e-10);
  }
}

TEST_CASE("dual of identity and of a unitary channel") {
  const SuperOperator id = SuperOperator::identity(3);
  test::Rng rng(3004);
  const Matrix a = hermitize(test::random_matrix(3, rng));
  REQUIRE((apply_to_operator(dual(id), a) - a).norm() < 1e-14);

  const Matrix u = test::random_unitary(3, rng);
  const SuperOperator uc = SuperOperator::unitary(u);
  const SuperOperator ucd = SuperOperator::unitary(Matrix(u.adjoint()));
  REQUIRE((apply_to_operator(dual(uc), a) - apply_to_operator(ucd, a)).norm() < 1e-12);
}

TEST_CASE("duality trace identity on random pairs") {
  test::Rng rng(3005);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Index d = 4;
    const SuperOperator e = test::random_tp_channel(d, 3, rng);
    const Matrix rho = test::random_density(d, rng);
    const Matrix a = hermitize(test::random_matrix(d, rng));
    const Complex lhs = (apply_to_operator(e, rho) * a).trace();
    const Complex rhs = (rho * apply_to_operator(dual(e), a)).trace();
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  REQUIRE(worst < 1e-10);
}

TEST_CASE("image_subspace basics") {
  test::Rng rng(3006);
  const SuperOperator e = test::random_tp_channel(4, 2, rng);
  REQUIRE(image_subspace(e, Subspace::zero(4)).dim() == 0);

  const Matrix u = test::random_unitary(4, rng);
  const Subspace x = test::random_subspace(4, 2, rng);
  const Subspace img = image_subspace(SuperOperator::unitary(u), x);
  REQUIRE(img.dim() == x.dim());
  REQUIRE(test::same_subspace(img, Subspace(4, u * x.basis)));
}

TEST_CASE("image of the |0> line under the averaged walk transition") {
  // Kraus {W1 P1/sqrt(2), W2 P1/sqrt(2)} applied to |0><0| spans two lines.
  const Program walk = build_walk();
  const TransitionOp tbar = averaged_transition(walk);
  const Subspace img = image_subspace(tbar, Subspace::line(basis_ket(4, 0)));
  REQUIRE(img.dim() == 2);
  const Vector v1 = (basis_ket(4, 0) + basis_ket(4, 1) + basis_ket(4, 3)) / std::sqrt(3.0);
  const Vector v2 = (basis_ket(4, 0) - basis_ket(4, 1) + basis_ket(4, 3)) / std::sqrt(3.0);
  REQUIRE(containment_residual(img, Subspace::line(v1)) < 1e-9);
  REQUIRE(containment_residual(img, Subspace::line(v2)) < 1e-9);

  // independent route: eigendecompose E(P) directly
  const Matrix ep = apply_to_operator(tbar, basis_ket(4, 0) * basis_ket(4, 0).adjoint());
  REQUIRE(test::same_subspace(img, support(ep)));
}

TEST_CASE("preimage_subspace basics") {
  test::Rng rng(3007);
  const SuperOperator e = test::random_tp_channel(4, 2, rng);
  REQUIRE(preimage_subspace(e, Subspace::full(4)).dim() == 4);

  const Matrix u = test::random_unitary(4, rng);
  const Subspace x = test::random_subspace(4, 2, rng);
  const Subspace pre = preimage_subspace(SuperOperator::unitary(u), x);
  REQUIRE(test::same_subspace(pre, Subspace(4, u.adjoint() * x.basis)));
}

TEST_CASE("preimage inside H0 reproduces the first walk divergence component") {
  const Program walk = build_walk();
  const Subspace h0 = h_zero_subspace(walk);
  const Subspace pd1 = intersect(h0, preimage_subspace(transition(walk, 1), h0));
  const Vector minus = (basis_ket(4, 1) - basis_ket(4, 3)) / std::sqrt(2.0);
  Matrix expect(4, 2);
  expect.col(0) = basis_ket(4, 0);
  expect.col(1) = minus;
  REQUIRE(test::same_subspace(pd1, Subspace(4, expect)));
}

TEST_CASE("image and support commute on random states") {
  test::Rng rng(3008);
  for (int trial = 0; trial < 100; ++trial) {
    const Index d = 2 + trial % 3;
    const SuperOperator e = test::random_tp_channel(d, 2, rng);
    const Matrix g = test::random_matrix(d, rng).leftCols(1 + trial % d);
    const Matrix rho = g * g.adjoint();
    const Matrix rho_n = rho / rho.trace().real();
    REQUIRE(test::same_subspace(image_subspace(e, support(rho_n)),
                                support(apply_to_operator(e, rho_n))));
  }
}

TEST_CASE("Galois connection between image and preimage") {
  test::Rng rng(3009);
  int true_cases = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const Index d = 2 + trial % 4;  // up to 5
    const SuperOperator e = (trial % 2 == 0) ? test::random_tp_channel(d, 2, rng)
                                             : SuperOperator::unitary(test::random_unitary(d, rng));
    Subspace y = test::random_subspace(d, 1 + trial % 2, rng);
    Subspace x = test::random_subspace(d, 1 + (trial / 2) % d, rng);
    // bias some trials toward the "true" side of the equivalence
    if (trial % 3 == 0) x = join(image_subspace(e, y), x);
    if (trial % 3 == 1) y = preimage_subspace(e, x);

    const bool forward = contains(x, image_subspace(e, y));
    const bool backward = contains(preimage_subspace(e, x), y);
    if (forward) ++true_cases;
    REQUIRE(forward == backward);
  }
  REQUIRE(true_cases > 10);  // the biased constructions must actually bite
}

TEST_CASE("preimage maximality") {
  test::Rng rng(3010);
  for (int trial = 0; trial < 20; ++trial) {
    const Index d = 3 + trial % 2;
    const SuperOperator e = test::random_tp_channel(d, 2, rng);
    const Subspace x = test::random_subspace(d, 1 + trial % (d - 1), rng);
    const Subspace pre = preimage_subspace(e, x);
    REQUIRE(contains(x, image_subspace(e, pre)));
  }
}
