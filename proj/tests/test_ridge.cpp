#include "sketchreg/linalg.hpp"
#include "sketchreg/problems.hpp"
#include "sketchreg/ridge.hpp"
#include "sketchreg/statdim.hpp"

#include <doctest.h>

using namespace sketchreg;

namespace {

// normal equations, independent of the QR path used by solve_exact
Matrix normal_eq(const Matrix& A, const Matrix& b, double lambda) {
  const Matrix G = A.transpose() * A + lambda * Matrix::Identity(A.cols(), A.cols());
  return G.ldlt().solve(A.transpose() * b);
}

Problem seeded(Index n, Index d, std::uint64_t seed, Index rhs_cols = 1) {
  Rng rng(seed);
  GeneratorSpec g{n, d, SpectrumShape::Geometric, 0.8};
  g.rhs_cols = rhs_cols;
  return generate_problem(g, rng);
}

}  // namespace

TEST_SUITE("ridge") {

TEST_CASE("identity design") {
  Matrix b(2, 1);
  b << 2, 4;
  const RidgeSolution s = solve_exact({Matrix::Identity(2, 2), b, 1.0});
  CHECK(s.x(0, 0) == doctest::Approx(1.0));
  CHECK(s.x(1, 0) == doctest::Approx(2.0));
  CHECK(s.objective == doctest::Approx(10.0));
  const RidgeSolution z = solve_exact({Matrix::Identity(2, 2), b, 0.0});
  CHECK((z.x - b).norm() < 1e-15);
  CHECK(z.objective == doctest::Approx(0.0));
}

TEST_CASE("exact solution is stationary") {
  const Problem p = seeded(30, 8, 1);
  const double lambda = 0.7;
  const RidgeSolution s = solve_exact({p.A, p.rhs, lambda});
  const Matrix grad = 2 * p.A.transpose() * (p.A * s.x - p.rhs) + 2 * lambda * s.x;
  const double s1 = singular_values(p.A)(0);
  CHECK(grad.norm() <= 1e-8 * (s1 * s1 + lambda) * s.x.norm());
  CHECK((s.x - normal_eq(p.A, p.rhs, lambda)).norm() < 1e-10 * s.x.norm());
}

TEST_CASE("wide exact path matches normal equations") {
  const Problem p = seeded(12, 40, 2);
  const double lambda = 0.2;
  const RidgeSolution s = solve_exact({p.A, p.rhs, lambda});
  CHECK((s.x - normal_eq(p.A, p.rhs, lambda)).norm() < 1e-9 * s.x.norm());
}

TEST_CASE("lambda = 0 on a rank-deficient design is the minimum-norm solution") {
  Rng rng(3);
  const Matrix A = gaussian_matrix(10, 2, rng) * gaussian_matrix(2, 4, rng);
  const Matrix b = gaussian_matrix(10, 1, rng);
  const RidgeSolution s = solve_exact({A, b, 0.0});
  CHECK(s.min_norm);
  const Matrix pinv = A.completeOrthogonalDecomposition().pseudoInverse();
  CHECK((s.x - pinv * b).norm() < 1e-9);
}

TEST_CASE("identity sketches collapse to the exact solution") {
  const Problem p = seeded(200, 10, 4);
  const RidgeProblem rp{p.A, p.rhs, 0.05};
  const RidgeSolution ex = solve_exact(rp);
  const RidgeSolution rows = solve_sketched_rows(rp, SketchSpec::identity());
  CHECK(std::abs(rows.objective - ex.objective) <= 1e-10 * ex.objective);
  CHECK((rows.x - ex.x).norm() < 1e-8 * ex.x.norm());

  const Problem w = seeded(15, 300, 5);
  const RidgeProblem wp{w.A, w.rhs, 0.05};
  const RidgeSolution wex = solve_exact(wp);
  const RidgeSolution cols = solve_sketched_cols(wp, SketchSpec::identity());
  CHECK(std::abs(cols.objective - wex.objective) <= 1e-6 * wex.objective);
}

TEST_CASE("wide stationarity system on the identity design") {
  Matrix b(2, 1);
  b << 2, 4;
  const RidgeSolution s = solve_sketched_cols({Matrix::Identity(2, 2), b, 1.0}, SketchSpec::identity());
  CHECK(s.x(0, 0) == doctest::Approx(1.0));
  CHECK(s.x(1, 0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(solve_sketched_cols({Matrix::Identity(2, 2), b, 0.0}, SketchSpec::identity()), ContractError);
}

TEST_CASE("guard keeps the objective below ||b||^2") {
  const Problem p = seeded(400, 10, 6);
  const double s1 = p.sigma(0);
  const RidgeProblem rp{p.A, p.rhs, 10.0 * s1 * s1};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const RidgeSolution s = solve_sketched_rows(rp, SketchSpec::count_sketch(2, seed));
    CHECK(s.objective <= p.rhs.squaredNorm() * (1 + 1e-12));
  }
}

TEST_CASE("multiple responses") {
  const Problem p = seeded(300, 12, 7, 4);
  const RidgeProblem rp{p.A, p.rhs, 0.1};
  const RidgeSolution ex = solve_exact(rp);
  CHECK((ex.x - normal_eq(p.A, p.rhs, 0.1)).norm() < 1e-9 * ex.x.norm());
  const RidgeSolution id = solve_sketched_mr(rp, SketchSpec::identity());
  CHECK((id.x - ex.x).norm() < 1e-8 * ex.x.norm());

  // one response column reduces to the row-sketched solver exactly
  const RidgeProblem one{p.A, p.rhs.col(0), 0.1};
  const SketchSpec s = SketchSpec::count_sketch(80, 3);
  CHECK(solve_sketched_mr(one, s).x == solve_sketched_rows(one, s).x);
}

TEST_CASE("multiple responses at moderate sketch size") {
  Rng rng(8);
  GeneratorSpec g{2000, 20, SpectrumShape::Geometric, 0.8};
  g.rhs_cols = 15;
  int pass = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng r(seed);
    const Problem p = generate_problem(g, r);
    const double lambda = lambda_for_sd(p.sigma, 5.0);
    const RidgeProblem rp{p.A, p.rhs, lambda};
    const double ex = solve_exact(rp).objective;
    const SketchSpec s = tall_ridge_sketch(SizePolicy::calibrated(), 5.0, 0.5, 2000, seed);
    pass += solve_sketched_mr(rp, s).objective <= 1.5 * ex ? 1 : 0;
  }
  CHECK(pass >= 8);
}

TEST_CASE("wide sizing") {
  const Problem p = seeded(20, 2000, 9);
  const double lambda = p.sigma(0) * p.sigma(0);
  const WideSizing w = wide_ridge_sketch(SizePolicy::calibrated(), p.A, lambda, 0.5, 1);
  CHECK(w.sigma1_estimate >= p.sigma(0) * 0.99);
  CHECK(w.eps_prime == doctest::Approx(0.25 / (1 + 3 * w.sigma1_estimate * w.sigma1_estimate / lambda)));
  CHECK(w.clamped == w.spec.is_identity());
}

}
