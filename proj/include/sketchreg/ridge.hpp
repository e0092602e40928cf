#pragma once

#include "sketchreg/rng.hpp"
#include "sketchreg/size_policy.hpp"
#include "sketchreg/sketch.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sketchreg {

/// min_x ||A x - rhs||_F^2 + lambda ||x||_F^2; rhs may have several columns.
struct RidgeProblem {
  Matrix A;
  Matrix rhs;
  double lambda = 0.0;

  void validate() const;
};

struct RidgeSolution {
  Matrix x;
  double objective = 0.0;
  std::string method;
  std::vector<SketchSpec> sketches;
  Index sketch_rows = 0;
  bool min_norm = false;       // lambda = 0 and A rank deficient: pseudo-inverse solution
  bool guard_applied = false;  // x = 0 beat the sketched candidate
  double sketch_seconds = 0.0;
  double solve_seconds = 0.0;
  double wall_seconds = 0.0;
};

double ridge_objective(const MatrixRef& A, const MatrixRef& rhs, double lambda, const MatrixRef& x);
inline double ridge_objective(const RidgeProblem& p, const MatrixRef& x) {
  return ridge_objective(p.A, p.rhs, p.lambda, x);
}

/// Direct solve. Uses the d x d formulation (stacked least squares on
/// [A; sqrt(lambda) I]) when d <= n and the n x n one, x = A^T (A A^T +
/// lambda I)^{-1} b, otherwise. lambda = 0 falls back to the pseudo-inverse.
RidgeSolution solve_exact(const RidgeProblem& p);

struct SketchedRidgeOptions {
  int repeats = 1;  // independent sketches; the lowest objective wins
};

/// Sketch-and-solve on the rows: solves the problem with (S A, S b) where
/// S = s2 o s1 (or s1), keeping the lambda ||x||^2 term exact. The reported
/// objective is that of the original problem; x = 0 is returned when it is
/// no worse.
RidgeSolution solve_sketched_rows(const RidgeProblem& p, const SketchSpec& s1,
                                  const std::optional<SketchSpec>& s2 = std::nullopt,
                                  const SketchedRidgeOptions& opts = {});

/// Multiple-response form of solve_sketched_rows; one factorization of S A is
/// shared by every column of the right-hand side.
RidgeSolution solve_sketched_mr(const RidgeProblem& p, const SketchSpec& s1,
                                const std::optional<SketchSpec>& s2 = std::nullopt,
                                const SketchedRidgeOptions& opts = {});

/// Wide regime: with B = S A^T, G = B^T B and c = A A^T b, solves
/// (lambda G + G^2) y = c by pseudo-inverse and returns x = A^T y.
/// `spec` acts on the d columns of A (as a left sketch of A^T).
/// Throws ContractError for lambda = 0.
RidgeSolution solve_sketched_cols(const RidgeProblem& p, const SketchSpec& spec,
                                  const SketchedRidgeOptions& opts = {});

/// Tall-regime sketch: CountSketch with K_sparse (sd/eps + sd^2) rows, followed
/// by an SRHT with the SRHT row count when that is smaller. Stages at or above
/// n rows are replaced by Identity.
SketchSpec tall_ridge_sketch(const SizePolicy& policy, double sd_hat, double eps, Index n, std::uint64_t seed);

struct WideSizing {
  double sigma1_estimate = 0.0;  // power method, 10 iterations, times 1.1
  double eps_prime = 0.0;        // (eps/2) / (1 + 3 sigma1^2 / lambda)
  Index m = 0;                   // requested rows before clamping
  bool clamped = false;          // m >= d: the sketch is the identity
  SketchSpec spec;
};

WideSizing wide_ridge_sketch(const SizePolicy& policy, const MatrixRef& A, double lambda, double eps,
                             std::uint64_t seed);

} // namespace sketchreg
