#pragma once

#include "sketchreg/size_policy.hpp"
#include "sketchreg/sketch.hpp"

#include <optional>
#include <vector>

namespace sketchreg {

/// Rank-k factors of min ||Y X - A||_F^2 + lambda ||Y||_F^2 + lambda ||X||_F^2.
struct LowRankFactors {
  Matrix Y;  // n x k
  Matrix X;  // k x d
  double objective = 0.0;
  Index k = 0;
  double lambda = 0.0;
  double sd = 0.0;              // sd_lambda(Y) for the closed form
  bool rank_deficient = false;  // factors padded with zeros
  std::vector<SketchSpec> sketches;
  double sketch_seconds = 0.0;
  double solve_seconds = 0.0;
};

double lowrank_objective(const MatrixRef& A, const MatrixRef& Y, const MatrixRef& X, double lambda);

/// Y = U_k (Sigma_k - lambda)_+^{1/2}, X = (Sigma_k - lambda)_+^{1/2} V_k^T.
LowRankFactors solve_exact_shrink(const MatrixRef& A, Index k, double lambda);

/// Same closed form without the k <= min(n, d) precondition: directions past
/// min(n, d) come back as zero columns/rows and set rank_deficient.
LowRankFactors shrink_padded(const MatrixRef& A, Index k, double lambda);

struct LowRankSketches {
  SketchSpec S;   // m x n, left
  SketchSpec R;   // d x m', right
  SketchSpec S2;  // p x n, left
  SketchSpec R2;  // d x p', right

  static LowRankSketches identity();
};

struct LowRankSizes {
  double sd_hat = 0.0;  // min(k, sd estimate)
  Index m = 0, m_prime = 0, p = 0, p_prime = 0;
};

LowRankSizes lowrank_sizes(const SizePolicy& policy, double sd_hat, Index k, double eps);

/// Staged CountSketch/SRHT specs for the four sizes, clamped to A's dimensions.
LowRankSketches plan_lowrank_sketches(const SizePolicy& policy, const LowRankSizes& sizes, Index n, Index d,
                                      std::uint64_t seed);

struct CorePieces {
  Matrix SA;     // m x d
  Matrix AR;     // n x m'
  Matrix S2AR;   // p x m'
  Matrix SAR2;   // m x p'
  Matrix S2AR2;  // p x p'
  LowRankSketches sketches;
  SketchStats stats;
};

CorePieces build_core(const MatrixRef& A, const LowRankSketches& sketches);

struct CoreSolution {
  Matrix Z_R;  // m' x k
  Matrix Z_S;  // k x m
  Matrix Zp_R; // r_C x k, with U_C Zp_R = C Z_R
  Matrix Zp_S; // k x r_D, with Zp_S U_D^T = Z_S D
  Matrix U_C;
  Matrix U_D;
  bool rank_deficient = false;
};

/// min over Z_R, Z_S of ||C Z_R Z_S D - G||_F^2 + lambda ||C Z_R||_F^2 + lambda ||Z_S D||_F^2,
/// through orthonormal bases of range(C) and rowspan(D) from pivoted QR and
/// triangular back-solves.
CoreSolution solve_core(const MatrixRef& C, const MatrixRef& D, const MatrixRef& G, Index k, double lambda);

struct LowRankOptions {
  bool transpose_dispatch = true;   // solve on A^T when d > n
  std::optional<double> sd_hat;     // skip the estimator
};

/// Sketched solver with explicit sketches: Y = A R Z_R, X = Z_S S A.
LowRankFactors solve_sketched(const MatrixRef& A, Index k, double lambda, const LowRankSketches& sketches);

/// Sketched solver with policy sizes.
LowRankFactors solve_sketched(const MatrixRef& A, Index k, double lambda, double eps, const SizePolicy& policy,
                              std::uint64_t seed, const LowRankOptions& opts = {});

} // namespace sketchreg
