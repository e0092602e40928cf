#pragma once

#include "sketchreg/lowrank.hpp"
#include "sketchreg/measures.hpp"
#include "sketchreg/size_policy.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sketchreg {

/// Fit term f1(||Y X - A||_(p)): the Schatten-p norm, squared or not.
struct FitTerm {
  double p = 2.0;
  bool squared = true;

  double operator()(const MatrixRef& E) const;
};

/// Diagonal core solution W = diag(w), Z = diag(z) of the k x k problem
/// with diagonal Sigma_k.
struct DiagSolution {
  Vector w;
  Vector z;
  double alpha = 0.0;   // shrinkage level, where one applies
  bool convex = true;   // empirical convexity of the scalar search, where one applies
};

/// sigma_k: the k leading singular values; tail: the remaining ones.
using DiagSolver = std::function<DiagSolution(const Vector& sigma_k, const Vector& tail)>;

enum class DiagVariant {
  FrobTrace,      // ||YX - A||_F^2 + lambda (||Y||_F^2 + ||X||_F^2)  (equivalently + 2 lambda ||YX||_(1))
  FrobFrobYX,     // ||YX - A||_F^2 + lambda ||YX||_F^2
  SchattenTrace,  // ||YX - A||_(p) + lambda ||YX||_(1)
};

std::string to_string(DiagVariant v);
DiagVariant diag_variant_from_string(const std::string& name);

/// Closed forms: sqrt((sigma - lambda)_+), sqrt(sigma / (1 + lambda)), and
/// sqrt((sigma - alpha)_+) with alpha from a bracketed golden-section search
/// on [0, sigma_1] (tolerance 1e-10). Only the Schatten fit couples to the tail.
DiagSolution diag_solver_shrink(const Vector& sigma_k, double lambda, DiagVariant variant, double p = 2.0,
                                const Vector& tail = Vector());
DiagSolver make_diag_solver(double lambda, DiagVariant variant, double p = 2.0);

/// The fit term and pair measure whose minimizer the variant computes.
FitTerm variant_fit(DiagVariant variant, double p = 2.0);
PairMeasure variant_pair(DiagVariant variant, double lambda);

struct GeneralLowRank {
  Matrix Y;
  Matrix X;
  double objective = 0.0;
  DiagSolution diag;
  bool singular_core = false;  // some diagonal entry of W or Z is zero
  std::vector<SketchSpec> sketches;
};

/// Throws ContractError unless f is padding invariant, left orthogonally
/// invariant and left reduced by contractions in Y, and the mirror
/// properties in X.
void require_lowrank_flags(const PairMeasure& f);

/// f1(||Y X - A||_(p)) + f(Y, X) minimized through the SVD of A and the
/// diagonal k x k solver; Y = U [W; 0], X = [Z 0] V^T.
GeneralLowRank solve_diag_reduction(const MatrixRef& A, Index k, const PairMeasure& f, const FitTerm& fit,
                                    const DiagSolver& solver);

/// Sketched reduction for the Frobenius fit term: the core
/// Q_l^T S^ A R^ Q_r is solved by solve_diag_reduction and lifted back.
GeneralLowRank solve_general_lowrank(const MatrixRef& A, Index k, const PairMeasure& f, const DiagSolver& solver,
                                     const LowRankSketches& sketches);
GeneralLowRank solve_general_lowrank(const MatrixRef& A, Index k, const PairMeasure& f, const DiagSolver& solver,
                                     double eps, const SizePolicy& policy, std::uint64_t seed);

/// Z minimizing ||A Z - B||_F^2 + f(Z) for a reduced problem.
using SmallSolver = std::function<Matrix(const MatrixRef& A, const MatrixRef& B)>;

SmallSolver ridge_small_solver(double lambda);

enum class ProxKind { FrobeniusSq, Nuclear, VNorm1, VNorm2 };

struct ProxOptions {
  int max_iterations = 20000;
  double tol = 1e-12;  // relative change between iterates
};

/// FISTA on ||A Z - B||_F^2 + lambda g(Z).
Matrix proximal_gradient(const MatrixRef& A, const MatrixRef& B, ProxKind kind, double lambda,
                         const ProxOptions& opts = {});
SmallSolver proximal_small_solver(ProxKind kind, double lambda, const ProxOptions& opts = {});
MatrixMeasure prox_measure(ProxKind kind, double lambda);

struct GeneralRegression {
  Matrix X;
  double objective = 0.0;
  double reduced_objective = 0.0;
  bool guard_applied = false;
  Index reduced_rows = 0;
  Index reduced_cols = 0;
  std::vector<SketchSpec> sketches;
};

struct RegressionSketches {
  SketchSpec S;      // left, rows of (A, B)
  SketchSpec R_hat;  // right, columns of S B
  SketchSpec S_hat;  // left, rows of (A, B R^)

  static RegressionSketches identity();
};

/// Throws ContractError unless f is padding invariant, right orthogonally
/// invariant and right reduced by contractions.
void require_regression_flags(const MatrixMeasure& f);

GeneralRegression solve_general_regression(const MatrixRef& A, const MatrixRef& B, const MatrixMeasure& f,
                                           const SmallSolver& small, const RegressionSketches& sketches);

/// Policy sizes: S and S^ with K_affine r^2 / eps^2 rows, R^ with
/// K_affine rank(S B)^2 / eps^2 columns, where r defaults to rank(A).
GeneralRegression solve_general_regression(const MatrixRef& A, const MatrixRef& B, const MatrixMeasure& f,
                                           const SmallSolver& small, double eps, const SizePolicy& policy,
                                           std::uint64_t seed, std::optional<double> rank_hat = std::nullopt);

} // namespace sketchreg
