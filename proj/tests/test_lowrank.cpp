#include "sketchreg/linalg.hpp"
#include "sketchreg/lowrank.hpp"
#include "sketchreg/problems.hpp"
#include "sketchreg/statdim.hpp"

#include <doctest.h>

#include <cmath>

using namespace sketchreg;

namespace {

// alternating ridge updates; each step is an exact block minimization
double alternating_min(const Matrix& A, Index k, double lambda, Rng& rng) {
  Matrix Y = gaussian_matrix(A.rows(), k, rng);
  Matrix X;
  const Matrix Ik = Matrix::Identity(k, k);
  double prev = std::numeric_limits<double>::infinity(), obj = prev;
  for (int it = 0; it < 200000; ++it) {
    X = (Y.transpose() * Y + lambda * Ik).ldlt().solve(Y.transpose() * A);
    Y = (X * X.transpose() + lambda * Ik).ldlt().solve(X * A.transpose()).transpose();
    obj = (Y * X - A).squaredNorm() + lambda * (Y.squaredNorm() + X.squaredNorm());
    if (prev - obj <= 1e-15 * obj) break;
    prev = obj;
  }
  return obj;
}

double core_objective(const Matrix& C, const Matrix& D, const Matrix& G, const CoreSolution& s, double lambda) {
  const Matrix L = C * s.Z_R, R = s.Z_S * D;
  return (L * R - G).squaredNorm() + lambda * (L.squaredNorm() + R.squaredNorm());
}

}  // namespace

TEST_SUITE("lowrank") {

TEST_CASE("closed form on diag(3,2,1)") {
  const Matrix A = Vector::LinSpaced(3, 3.0, 1.0).asDiagonal();
  const LowRankFactors f = solve_exact_shrink(A, 2, 1.5);
  CHECK(f.objective == doctest::Approx(11.5).epsilon(1e-12));
  const Vector w = singular_values(f.Y);
  CHECK(w(0) == doctest::Approx(std::sqrt(1.5)));
  CHECK(w(1) == doctest::Approx(std::sqrt(0.5)));
  Matrix expect = Matrix::Zero(3, 3);
  expect(0, 0) = 1.5;
  expect(1, 1) = 0.5;
  CHECK((f.Y * f.X - expect).norm() < 1e-12);
  Rng rng(1);
  CHECK(alternating_min(A, 2, 1.5, rng) == doctest::Approx(11.5).epsilon(1e-8));
}

TEST_CASE("lambda = 0 with k = rank reproduces A") {
  Rng rng(2);
  const Matrix A = gaussian_matrix(7, 4, rng);
  const LowRankFactors f = solve_exact_shrink(A, 4, 0.0);
  CHECK(f.objective <= 1e-20 + 1e-12 * A.squaredNorm());
}

TEST_CASE("lambda above sigma_1 zeroes the factors") {
  Rng rng(3);
  const Matrix A = gaussian_matrix(6, 5, rng);
  const double s1 = singular_values(A)(0);
  const LowRankFactors f = solve_exact_shrink(A, 3, 1.01 * s1);
  CHECK(f.Y.norm() == 0.0);
  CHECK(f.X.norm() == 0.0);
  CHECK(f.objective == doctest::Approx(A.squaredNorm()));
}

TEST_CASE("closed form matches alternating minimization on small instances") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    const Matrix A = gaussian_matrix(8, 6, rng);
    const Vector s = singular_values(A);
    const double lambda = 0.5 * s(2);
    const double closed = solve_exact_shrink(A, 3, lambda).objective;
    CHECK(std::abs(alternating_min(A, 3, lambda, rng) - closed) <= 1e-6 * closed);
  }
}

TEST_CASE("identity sketches give the pieces and the closed form") {
  Rng rng(4);
  const Matrix A = gaussian_matrix(30, 20, rng);
  const CorePieces c = build_core(A, LowRankSketches::identity());
  CHECK(c.SA == A);
  CHECK(c.AR == A);
  CHECK(c.S2AR2 == A);
  const double lambda = singular_values(A)(5);
  const double closed = solve_exact_shrink(A, 4, lambda).objective;
  const double sk = solve_sketched(A, 4, lambda, LowRankSketches::identity()).objective;
  CHECK(std::abs(sk - closed) <= 1e-6 * closed);
  const LowRankFactors zero = solve_sketched(A, 20, 0.0, LowRankSketches::identity());
  CHECK(zero.objective <= 1e-8 * A.squaredNorm());
}

TEST_CASE("piece dimensions follow the policy sizes") {
  Rng rng(5);
  const Matrix A = gaussian_matrix(300, 200, rng);
  SizePolicy policy;
  policy.k_lowrank = 0.2;
  policy.k_subspace = 1e-3;
  const LowRankSizes sz = lowrank_sizes(policy, 5.0, 5, 0.5);
  const LowRankSketches sk = plan_lowrank_sketches(policy, sz, 300, 200, 9);
  const CorePieces c = build_core(A, sk);
  const auto dim = [](Index want, Index input) { return want >= input ? input : want; };
  CHECK(c.SA.rows() == dim(sz.m, 300));
  CHECK(c.AR.cols() == dim(sz.m_prime, 200));
  CHECK(c.S2AR.rows() == dim(sz.p, 300));
  CHECK(c.SAR2.cols() == dim(sz.p_prime, 200));
  CHECK(c.S2AR2.rows() == c.S2AR.rows());
  CHECK(c.S2AR2.cols() == c.SAR2.cols());
}

TEST_CASE("countsketch pieces touch each stored entry once per side") {
  Rng rng(6);
  const Matrix A = gaussian_matrix(100, 80, rng);
  LowRankSketches sk{SketchSpec::count_sketch(20, 1), SketchSpec::count_sketch(15, 2, Side::Right),
                     SketchSpec::identity(), SketchSpec::identity(Side::Right)};
  SketchStats st;
  apply(sk.S, A, &st);
  CHECK(st.value_updates == A.size());
  SketchStats st2;
  apply(sk.R, A, &st2);
  CHECK(st2.value_updates == A.size());
}

TEST_CASE("core with identity bases is the closed form") {
  const Matrix G = Vector::LinSpaced(3, 3.0, 1.0).asDiagonal();
  const Matrix I = Matrix::Identity(3, 3);
  const CoreSolution s = solve_core(I, I, G, 2, 1.5);
  CHECK(core_objective(I, I, G, s, 1.5) == doctest::Approx(11.5).epsilon(1e-12));
  const CoreSolution z = solve_core(I, I, G, 2, 1e6);
  CHECK(z.Z_R.norm() == 0.0);
  CHECK(z.Z_S.norm() == 0.0);
}

TEST_CASE("core at lambda = 0 against the projected dense oracle") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    const Matrix C = gaussian_matrix(8, 4, rng), D = gaussian_matrix(4, 8, rng);
    const Matrix G = gaussian_matrix(8, 8, rng);
    const Matrix PC = C * C.completeOrthogonalDecomposition().pseudoInverse();
    const Matrix PD = D.completeOrthogonalDecomposition().pseudoInverse() * D;
    const Matrix P = PC * G * PD;
    const Vector s = singular_values(P);
    const double oracle = (G - P).squaredNorm() + s.tail(s.size() - 2).squaredNorm();
    const CoreSolution sol = solve_core(C, D, G, 2, 0.0);
    CHECK(std::abs(core_objective(C, D, G, sol, 0.0) - oracle) <= 1e-9 * G.squaredNorm());

    // planted: G in the span, k = rank => zero objective
    const Matrix M = gaussian_matrix(4, 2, rng) * gaussian_matrix(2, 4, rng);
    const Matrix Gp = C * M * D;
    CHECK(core_objective(C, D, Gp, solve_core(C, D, Gp, 2, 0.0), 0.0) <= 1e-18 * Gp.squaredNorm() + 1e-20);
  }
}

TEST_CASE("sketched objective is never below the closed form") {
  Rng rng(7);
  GeneratorSpec g{200, 120, SpectrumShape::Power, 1.0};
  g.noise = 0.05;
  const Problem p = generate_problem(g, rng);
  const double lambda = p.sigma(p.sigma.size() / 2);
  const double closed = solve_exact_shrink(p.A, 6, lambda).objective;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const LowRankFactors f = solve_sketched(p.A, 6, lambda, 0.5, SizePolicy::calibrated(), seed);
    CHECK(f.objective >= closed * (1 - 1e-9));
  }
}

TEST_CASE("wide input dispatches through the transpose") {
  Rng rng(8);
  const Matrix A = gaussian_matrix(40, 90, rng);
  const double lambda = singular_values(A)(3);
  const LowRankFactors f = solve_sketched(A, 3, lambda, 0.5, SizePolicy::calibrated(), 1);
  CHECK(f.Y.rows() == 40);
  CHECK(f.X.cols() == 90);
  CHECK(f.objective == doctest::Approx(lowrank_objective(A, f.Y, f.X, lambda)));
}

}
