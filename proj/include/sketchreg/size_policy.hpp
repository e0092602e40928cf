#pragma once

#include "sketchreg/sketch.hpp"

#include <string>

namespace sketchreg {

/// Constants multiplying the sketch-size formulas. The formulas fix how sizes
/// scale with the statistical dimension and epsilon; the constants are fitted
/// empirically (see `sketchreg calibrate`).
struct SizePolicy {
  double k_sparse = 1.0;    // CountSketch rows for ridge: K (sd/eps + sd^2)
  double k_srht = 1.0;      // SRHT rows for ridge: K (sd + log(1/eps)) log(sd/eps) / eps
  double k_gauss = 1.0;     // Gaussian rows for ridge: K sd / eps
  double k_subspace = 1.0;  // sparse subspace embedding: K r^2 / eps^2
  double k_affine = 1.0;    // sparse affine embedding: K r^2 / eps^2
  double k_cca = 1.0;       // shared CCA sketch: K sd^2 / eps^2
  double k_lowrank = 1.0;   // low-rank sketches: K sd / eps, K min(k, sd/eps) / eps, ...
  double k_wide = 1.0;      // wide ridge: K n / eps'^2
  double gamma = 0.25;      // OSNAP exponent; no optimality claim
  std::string provenance = "uncalibrated unit constants";

  /// Defaults produced by `sketchreg calibrate` on the shipped problem families.
  static SizePolicy calibrated();
};

enum class SizePurpose {
  RidgeRows,       // CountSketch for ridge
  RidgeRowsOsnap,
  RidgeRowsSrht,
  RidgeRowsGauss,
  RidgeCols,       // sd_hat = rank bound n, eps = eps'
  Subspace,        // sd_hat = rank
  Affine,          // sd_hat = rank
  LowrankS,
  LowrankR,        // needs k
  LowrankS2,       // sd_hat = m' (columns of AR)
  LowrankR2,       // sd_hat = m (rows of SA)
  Cca,
};

std::string to_string(SizePurpose p);
SizePurpose size_purpose_from_string(const std::string& name);

/// max(1, ceil(K * formula(sd_hat, eps))); nondecreasing in sd_hat and 1/eps.
Index recommend_size(const SizePolicy& policy, double sd_hat, double eps, SizePurpose purpose, Index k = 0);

/// CountSketch followed by SRHT for a target output dimension, clamped to the
/// input dimension. The CountSketch stage has K_subspace * target^2 rows and is
/// dropped when that is not below the input dimension; an output dimension at
/// or above the input dimension yields Identity.
SketchSpec staged_sketch(const SizePolicy& policy, Index target, Index input_dim, std::uint64_t seed,
                         Side side = Side::Left);

/// Identity when m >= input_dim, else `spec`.
SketchSpec clamp_to_input(const SketchSpec& spec, Index input_dim);

} // namespace sketchreg
