#include "sketchreg/linalg.hpp"
#include "sketchreg/problems.hpp"
#include "sketchreg/statdim.hpp"

#include <doctest.h>

using namespace sketchreg;

TEST_SUITE("statdim") {

TEST_CASE("exact statistical dimension") {
  CHECK(sd_exact(Vector::Ones(3), 0.0) == 3.0);
  Vector s(3);
  s << 3, 2, 1;
  CHECK(sd_exact(s, 1.0) == doctest::Approx(2.2));
  double prev = sd_exact(s, 0.0);
  for (double l = 1e-3; l < 1e4; l *= 3) {
    const double v = sd_exact(s, l);
    CHECK(v < prev);
    prev = v;
  }
  CHECK(sd_exact_of(Matrix(s.asDiagonal()), 1.0) == doctest::Approx(2.2));
  CHECK_THROWS(sd_exact(s, -1.0));
}

TEST_CASE("residual estimates") {
  const Matrix A = Vector::LinSpaced(3, 3.0, 1.0).asDiagonal();
  Rng rng(1);
  const double g = residual_norm_estimate(A, 2, rng).gamma;
  CHECK(g >= 2.0 / 3.0);
  CHECK(g <= 4.0 / 3.0);
  CHECK(residual_norm_estimate(A, 3, rng).gamma == 0.0);
  CHECK(residual_norm_estimate(A, 2, rng, {ResidualBackend::ExactSvd}).gamma == doctest::Approx(1.0));

  Rng r2(2);
  const Matrix L = gaussian_matrix(30, 3, r2) * gaussian_matrix(3, 20, r2);
  const ResidualEstimate e = residual_norm_estimate(L, 3, r2);
  CHECK(e.near_zero);
  CHECK(e.gamma <= 1e-10 * L.squaredNorm());
}

TEST_CASE("doubling trace on the identity") {
  Rng rng(3);
  const StatDimEstimate e = sd_estimate(Matrix::Identity(4, 4), 1.0, rng, {ResidualBackend::ExactSvd}, true);
  CHECK(e.z_prime == 2);
  CHECK(e.gamma_hat == doctest::Approx(2.0));
  CHECK(e.estimate == doctest::Approx(4.0));
  CHECK(e.exact == doctest::Approx(2.0));
  CHECK(e.lower <= 2.0);
  CHECK(e.upper >= 2.0);
}

TEST_CASE("heavy regularization stops at z = 1") {
  Rng rng(4);
  const Matrix A = gaussian_matrix(50, 20, rng);
  const double s1 = singular_values(A)(0);
  const StatDimEstimate e = sd_estimate(A, 1e6 * s1 * s1, rng);
  CHECK(e.z_prime == 1);
  CHECK(e.estimate == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("lambda must be positive") {
  Rng rng(5);
  CHECK_THROWS_AS(sd_estimate(Matrix::Identity(3, 3), 0.0, rng), ContractError);
}

TEST_CASE("estimates bracket the exact value on power-law spectra") {
  int ok = 0, total = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    GeneratorSpec g{300, 200, SpectrumShape::Power, 1.0};
    const Problem p = generate_problem(g, rng);
    for (double l : {1e-4, 1e-3, 1e-2, 1e-1}) {
      const double sd = sd_exact(p.sigma, l);
      const StatDimEstimate e = sd_estimate(p.A, l, rng);
      ++total;
      ok += (sd >= e.estimate / 16 && sd <= 1.5 * e.estimate) ? 1 : 0;
    }
  }
  CHECK(ok == total);
}

}
