#pragma once

#include "sketchreg/rng.hpp"
#include "sketchreg/sketch.hpp"

#include <string>
#include <utility>
#include <vector>

namespace sketchreg {

enum class EmbedCondition {
  ProdU1,    // ||U1^T S^T S U1 - U1^T U1||_2 <= 1/4
  ProdVec,   // ||U1^T S^T S r - U1^T r|| <= sqrt(eps Delta* / 2)
  Subspace,  // |‖SAx‖² − ‖Ax‖²| <= eps ‖Ax‖² for all x
  Affine,    // ‖S(AX − B)‖_F² = (1 ± eps) ‖AX − B‖_F²
  SpecAmm,   // ||C^T S^T S D − C^T D||_2 <= eps' ||C||_2 ||D||_2
};

std::string to_string(EmbedCondition c);

/// Outcome of a repeated empirical embedding check. `deviation` is the worst
/// deviation over trials; `pass` holds when at least `required_fraction` of
/// the trials stay at or under `threshold`.
struct EmbedReport {
  EmbedCondition condition = EmbedCondition::Subspace;
  double deviation = 0.0;
  double threshold = 0.0;
  bool pass = true;
  int trials = 0;
  int passes = 0;
  double required_fraction = 0.9;
  std::vector<double> deviations;  // per trial
  std::string note;

  double pass_fraction() const { return trials ? static_cast<double>(passes) / trials : 1.0; }
};

/// Each trial applies `spec` reseeded from `rng`; the deviation is computed
/// exactly from the singular values of S U, with U an orthonormal basis of
/// range(A).
EmbedReport check_subspace_embedding(const SketchSpec& spec, const MatrixRef& A, double eps, int trials, Rng& rng,
                                     double required_fraction = 0.9);

/// Falsifier: evaluates the ratio at the unsketched minimizer, at X = 0 and at
/// 50 seeded random X. Passing does not certify the sup over all X.
EmbedReport check_affine_embedding(const SketchSpec& spec, const MatrixRef& A, const MatrixRef& B, double eps,
                                   int trials, Rng& rng, double required_fraction = 0.9);

/// The two sufficient conditions for sketched ridge regression, measured
/// exactly against U1 (first n rows of an orthonormal basis of [A; sqrt(lambda) I]).
std::pair<EmbedReport, EmbedReport> check_ridge_conditions(const SketchSpec& spec, const MatrixRef& A,
                                                           const MatrixRef& b, double lambda, double eps,
                                                           int trials, Rng& rng,
                                                           double required_fraction = 0.9);

/// U1 = U Sigma (Sigma^2 + lambda I)^{-1/2} from the thin SVD of A.
Matrix ridge_leverage_basis(const MatrixRef& A, double lambda);

/// Spectral-norm approximate product deviation ||C^T S^T S D − C^T D||_2 /
/// (||C||_2 ||D||_2) over trials.
EmbedReport check_spectral_product(const SketchSpec& spec, const MatrixRef& C, const MatrixRef& D,
                                   double eps_prime, int trials, Rng& rng, double required_fraction = 0.9);

} // namespace sketchreg
