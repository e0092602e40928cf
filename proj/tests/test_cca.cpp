#include "sketchreg/cca.hpp"
#include "sketchreg/linalg.hpp"
#include "sketchreg/problems.hpp"

#include <doctest.h>

#include <cmath>

using namespace sketchreg;

namespace {

// whitening through Cholesky factors of the regularized Gram matrices
Vector cholesky_cca(const Matrix& A, const Matrix& B, double l1, double l2) {
  const Matrix Kx = A.transpose() * A + l1 * Matrix::Identity(A.cols(), A.cols());
  const Matrix Ky = B.transpose() * B + l2 * Matrix::Identity(B.cols(), B.cols());
  const Eigen::LLT<Matrix> Lx(Kx), Ly(Ky);
  const Matrix left = Lx.matrixL().solve(Matrix(A.transpose() * B));
  const Matrix M = Ly.matrixL().solve(Matrix(left.transpose())).transpose();
  return singular_values(M).head(std::min(A.cols(), B.cols()));
}

Problem cca_problem(std::uint64_t seed, Index n = 600) {
  Rng rng(seed);
  GeneratorSpec g{n, 10, SpectrumShape::Geometric, 0.8};
  g.cols_b = 8;
  return generate_problem(g, rng);
}

}  // namespace

TEST_SUITE("cca") {

TEST_CASE("one-dimensional cases") {
  const Matrix e1 = Vector::Unit(2, 0), e2 = Vector::Unit(2, 1);
  const CcaResult r0 = solve_exact_cca(e1, e1, 0.0, 0.0);
  CHECK(r0.sigmas(0) == doctest::Approx(1.0));
  CHECK(std::abs(r0.U(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(r0.V(0, 0)) == doctest::Approx(1.0));
  CHECK(r0.unregularized);
  CHECK(solve_exact_cca(e1, e1, 1.0, 1.0).sigmas(0) == doctest::Approx(0.5));
  CHECK(solve_exact_cca(e1, e2, 0.3, 0.7).sigmas(0) == doctest::Approx(0.0));
}

TEST_CASE("exact solver against the Cholesky whitening oracle") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Problem p = cca_problem(seed);
    const double l1 = 0.05, l2 = 0.2;
    const CcaResult r = solve_exact_cca(p.A, p.B, l1, l2);
    CHECK(r.q == 8);
    CHECK((r.sigmas - cholesky_cca(p.A, p.B, l1, l2)).norm() < 1e-10);
    CHECK(cca_constraint_residual(p.A, l1, r.U) <= 1e-8);
    CHECK(cca_constraint_residual(p.B, l2, r.V) <= 1e-8);
    const Matrix cross = r.U.transpose() * p.A.transpose() * p.B * r.V;
    CHECK((cross.diagonal() - r.sigmas).cwiseAbs().maxCoeff() < 1e-10);
    for (Index i = 1; i < r.q; ++i) CHECK(r.sigmas(i) <= r.sigmas(i - 1));
  }
}

TEST_CASE("singular unregularized input is reported") {
  Matrix A = Matrix::Zero(5, 2);
  A(0, 0) = 1;
  CHECK_THROWS_AS(solve_exact_cca(A, A, 0.0, 0.0), NumericalError);
}

TEST_CASE("identity sketch reproduces the exact solution") {
  const Problem p = cca_problem(3);
  const CcaResult ex = solve_exact_cca(p.A, p.B, 0.1, 0.1);
  const CcaResult id = solve_sketched_cca(p.A, p.B, 0.1, 0.1, SketchSpec::identity());
  CHECK((id.sigmas - ex.sigmas).norm() < 1e-12);
  const CcaValidation v = validate_cca(p.A, p.B, 0.1, 0.1, id, ex, 0.25);
  CHECK(v.pass);
  CHECK(v.max_sigma_dev < 1e-12);
}

TEST_CASE("validator: exact candidate and planted violation") {
  const Problem p = cca_problem(4);
  const CcaResult ex = solve_exact_cca(p.A, p.B, 0.1, 0.2);
  const CcaValidation same = validate_cca(p.A, p.B, 0.1, 0.2, ex, ex, 0.1);
  CHECK(same.pass);
  CHECK(same.max_sigma_dev == 0.0);
  CHECK(same.max_alignment_dev < 1e-10);
  for (double g : same.trace_gap) CHECK(g <= 1e-10);

  CcaResult bad = ex;
  bad.sigmas(0) += 0.2;
  const CcaValidation v = validate_cca(p.A, p.B, 0.1, 0.2, bad, ex, 0.1);
  CHECK_FALSE(v.pass);
  CHECK(v.max_sigma_dev == doctest::Approx(0.2));
}

TEST_CASE("undersketched regime fails the validator") {
  int fails = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Problem p = cca_problem(seed);
    const CcaResult ex = solve_exact_cca(p.A, p.B, 0.01, 0.01);
    const CcaResult c = solve_sketched_cca(p.A, p.B, 0.01, 0.01, SketchSpec::count_sketch(6, seed));
    fails += validate_cca(p.A, p.B, 0.01, 0.01, c, ex, 0.25).pass ? 0 : 1;
  }
  CHECK(fails >= 8);
}

TEST_CASE("policy sketch passes and respects the trace bound") {
  int pass = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Problem p = cca_problem(seed, 3000);
    const double l1 = lambda_for_sd(singular_values(p.A), 4.0), l2 = lambda_for_sd(singular_values(p.B), 4.0);
    const CcaResult ex = solve_exact_cca(p.A, p.B, l1, l2);
    const SketchSpec s = cca_sketch(SizePolicy::calibrated(), p.A, p.B, l1, l2, 0.25, seed);
    const CcaValidation v = validate_cca(p.A, p.B, l1, l2, solve_sketched_cca(p.A, p.B, l1, l2, s), ex, 0.25);
    if (!v.pass) continue;
    ++pass;
    for (std::size_t L = 0; L < v.trace_gap.size(); ++L) CHECK(v.trace_gap[L] <= 0.25 * (L + 1) + 1e-8);
  }
  CHECK(pass >= 8);
}

}
