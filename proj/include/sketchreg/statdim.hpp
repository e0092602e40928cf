#pragma once

#include "sketchreg/rng.hpp"
#include "sketchreg/types.hpp"

namespace sketchreg {

/// sum_i 1 / (1 + lambda / sigma_i^2) over nonzero sigma_i. With lambda = 0
/// this is the numerical rank (tolerance 1e-10 sigma_1).
double sd_exact(const Vector& sigma, double lambda);
double sd_exact_of(const MatrixRef& A, double lambda);

/// ||A - A_z||_F^2 from singular values.
double tail_energy(const Vector& sigma, Index z);

enum class ResidualBackend { Krylov, ExactSvd };

struct ResidualOptions {
  ResidualBackend backend = ResidualBackend::Krylov;
  int iterations = 8;  // Krylov depth q; the block width is 2z
};

struct ResidualEstimate {
  double gamma = 0.0;
  bool near_zero = false;  // below 1e-12 ||A||_F^2
};

/// Estimate of ||A - A_z||_F^2: the exact ||A||_F^2 minus the top-z energy
/// captured by a randomized block Krylov space. Returns 0 for z >= min(n, d).
ResidualEstimate residual_norm_estimate(const MatrixRef& A, Index z, Rng& rng, const ResidualOptions& opts = {});

struct StatDimEstimate {
  double estimate = 0.0;   // z' + gamma / lambda
  Index z_prime = 0;       // power of two
  double gamma_hat = 0.0;  // residual estimate at z'
  double lower = 0.0;      // (3/8) min(z', gamma / lambda)
  double upper = 0.0;      // (3/2) (z' + gamma / lambda)
  bool binding = true;     // false when doubling ran past min(n, d)
  bool exact_available = false;
  double exact = 0.0;
};

/// Doubles z = 1, 2, 4, ... until z >= gamma_z / lambda and reports
/// z' + gamma_{z'} / lambda. Throws ContractError for lambda <= 0.
StatDimEstimate sd_estimate(const MatrixRef& A, double lambda, Rng& rng, const ResidualOptions& opts = {},
                            bool with_exact = false);

} // namespace sketchreg
