#pragma once

#include "sketchreg/rng.hpp"
#include "sketchreg/types.hpp"

namespace sketchreg {

/// A = U diag(sigma) V^T with sigma nonincreasing. Thin factors are n x r and
/// d x r with r = min(n, d); full factors are square.
struct SvdFactors {
  Matrix U;
  Vector sigma;
  Matrix V;
  bool full = false;
};

SvdFactors svd(const MatrixRef& A, bool full = false);

/// Singular values only, nonincreasing.
Vector singular_values(const MatrixRef& A);

/// Number of singular values above rel_tol * sigma_max.
Index numerical_rank(const Vector& sigma, double rel_tol = 1e-10);

/// A = Q R with R^T R = A^T A + lambda I.
///
/// R comes from a Householder QR of [A; sqrt(lambda) I] (diagonal made
/// nonnegative). Q = A R^{-1} by triangular solve when R is invertible.
/// With lambda = 0 and rank-deficient A, `singular` is set and Q is taken
/// from the stacked factorization so that A = QR still holds.
struct LambdaQr {
  Matrix Q;
  Matrix R;
  double lambda = 0.0;
  bool singular = false;

  /// R^{-1} M. Throws NumericalError if R is singular.
  Matrix solve_r(const MatrixRef& M) const;
  /// R^{-1}, explicitly.
  Matrix r_inverse() const;
};

LambdaQr lambda_qr(const MatrixRef& A, double lambda);

/// M^+ B via SVD; singular values below rel_tol * sigma_max count as zero.
Matrix pinv_apply(const MatrixRef& M, const MatrixRef& B, double rel_tol = 1e-12);

/// Orthonormal basis of the column space of C, with the triangular change of
/// basis kept for back-solves: C P = Q_full [T T'; 0 *] with T r x r upper
/// triangular.
struct ColumnBasis {
  Matrix Q;  // rows(C) x r, orthonormal columns
  Matrix T;  // r x r upper triangular
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic> perm;
  Index rank = 0;
  Index n_cols = 0;

  /// Z with C Z = Q Zp, for Zp of shape r x k. Z is n_cols x k, zero outside
  /// the pivot columns.
  Matrix lift(const MatrixRef& Zp) const;
};

ColumnBasis column_basis(const MatrixRef& C, double rel_tol = 1e-12);

/// Orthonormal n x k matrix from the QR of a seeded Gaussian, signs fixed so
/// that R has a positive diagonal.
Matrix random_orthonormal(Index n, Index k, Rng& rng);

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng);

/// sigma_1 estimate by power iteration on A^T A.
double spectral_norm_estimate(const MatrixRef& A, int iterations, Rng& rng);

} // namespace sketchreg
