#pragma once

#include "sketchreg/rng.hpp"
#include "sketchreg/types.hpp"

#include <optional>
#include <string>

namespace sketchreg {

enum class SpectrumShape { Geometric, Power, Flat };

std::string to_string(SpectrumShape s);
SpectrumShape spectrum_shape_from_string(const std::string& name);

/// A = U0 diag(sigma) V0^T + noise * G / sqrt(max(n, d)), or, with
/// density < 1, a sparse matrix whose entries are independently nonzero
/// with probability `density` (spectrum fields unused).
struct GeneratorSpec {
  Index n = 100;
  Index d = 10;
  SpectrumShape shape = SpectrumShape::Geometric;
  double param = 0.5;   // geometric ratio or power-law exponent
  double sigma1 = 1.0;
  Index rank = 0;       // nonzero singular values; 0 = min(n, d)
  double noise = 0.0;
  double density = 1.0;
  Index rhs_cols = 1;
  double rhs_noise = 0.1;  // relative to ||A x0||_F
  Index cols_b = 0;        // second view for CCA; 0 = none
  double cca_coupling = 1.0;

  void validate() const;
};

/// sigma_i for i = 1..r: sigma1 r^(i-1), sigma1 i^(-exponent), or sigma1.
Vector make_spectrum(SpectrumShape shape, double param, double sigma1, Index r);

struct Problem {
  Matrix A;
  std::optional<SparseMatrix> sparse;  // set by the sparse generator
  Vector sigma;                        // construction spectrum (noise-free)
  Matrix rhs;                          // A x0 + noise, n x rhs_cols
  Matrix B;                            // second view, n x cols_b
};

Problem generate_problem(const GeneratorSpec& spec, Rng& rng);

/// Sparse n x d matrix with i.i.d. Bernoulli(density) pattern and normal values.
SparseMatrix sparse_random(Index n, Index d, double density, Rng& rng);

/// lambda > 0 with sd_lambda(sigma) = target (bisection on log lambda);
/// target must lie in (0, rank).
double lambda_for_sd(const Vector& sigma, double target);

} // namespace sketchreg
