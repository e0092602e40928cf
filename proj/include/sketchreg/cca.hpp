#pragma once

#include "sketchreg/size_policy.hpp"
#include "sketchreg/sketch.hpp"

#include <vector>

namespace sketchreg {

/// Regularized canonical correlations and weights of (A, B).
struct CcaResult {
  Vector sigmas;  // nonincreasing, length q = min(d, d')
  Matrix U;       // d x q
  Matrix V;       // d' x q
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  Index q = 0;
  bool unregularized = false;  // some lambda = 0 (valid only for full-rank inputs)
  std::vector<SketchSpec> sketches;
  double sketch_seconds = 0.0;
  double solve_seconds = 0.0;
};

/// Singular values of Q_A^T Q_B from lambda-QR factorizations A = Q_A R_A,
/// B = Q_B R_B; weights U = R_A^{-1} M, V = R_B^{-1} N. Throws NumericalError
/// when lambda = 0 leaves R singular.
CcaResult solve_exact_cca(const MatrixRef& A, const MatrixRef& B, double lambda1, double lambda2);

/// solve_exact_cca on (S A, S B) with one shared sketch S.
CcaResult solve_sketched_cca(const MatrixRef& A, const MatrixRef& B, double lambda1, double lambda2,
                             const SketchSpec& spec);

/// CountSketch with K_cca max(sd1, sd2)^2 / eps^2 rows (Identity when that
/// reaches n); sd values come from the estimator.
SketchSpec cca_sketch(const SizePolicy& policy, const MatrixRef& A, const MatrixRef& B, double lambda1,
                      double lambda2, double eps, std::uint64_t seed, double* sd_hat_out = nullptr);

struct CcaValidation {
  double eta = 0.0;
  double max_sigma_dev = 0.0;       // max_i |sigma_hat_i - sigma_i|
  double max_constraint_dev = 0.0;  // max entry of |U^T (A^T A + l1 I) U - I| and the B analogue
  double max_alignment_dev = 0.0;   // max_i |u_i^T A^T B v_i - sigma_i|
  bool pass = false;
  std::vector<double> trace_gap;    // entry L-1: tr(U_L^T A^T B V_L) candidate minus exact
};

CcaValidation validate_cca(const MatrixRef& A, const MatrixRef& B, double lambda1, double lambda2,
                           const CcaResult& candidate, const CcaResult& exact, double eta);

/// Max-abs entry of U^T (A^T A + lambda I) U - I.
double cca_constraint_residual(const MatrixRef& A, double lambda, const MatrixRef& U);

} // namespace sketchreg
