#include "sketchreg/linalg.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace sketchreg {

namespace {

template <int Options>
SvdFactors run_svd(const MatrixRef& A, bool full) {
  Eigen::BDCSVD<Matrix> dec(A, Options);
  if (dec.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "svd did not converge on " << A.rows() << "x" << A.cols()
        << " matrix (frobenius norm " << A.norm() << ", max abs entry "
        << (A.size() ? A.cwiseAbs().maxCoeff() : 0.0) << ", finite "
        << (A.allFinite() ? "yes" : "no") << ")";
    throw NumericalError(msg.str());
  }
  return SvdFactors{dec.matrixU(), dec.singularValues(), dec.matrixV(), full};
}

} // namespace

SvdFactors svd(const MatrixRef& A, bool full) {
  if (!A.allFinite()) throw NumericalError("svd: input has non-finite entries");
  if (A.rows() == 0 || A.cols() == 0) {
    SvdFactors out;
    out.full = full;
    out.U = full ? Matrix::Identity(A.rows(), A.rows()) : Matrix(A.rows(), 0);
    out.V = full ? Matrix::Identity(A.cols(), A.cols()) : Matrix(A.cols(), 0);
    out.sigma = Vector(0);
    return out;
  }
  if (full) return run_svd<Eigen::ComputeFullU | Eigen::ComputeFullV>(A, true);
  return run_svd<Eigen::ComputeThinU | Eigen::ComputeThinV>(A, false);
}

Vector singular_values(const MatrixRef& A) {
  if (A.rows() == 0 || A.cols() == 0) return Vector(0);
  Eigen::BDCSVD<Matrix> dec(A);
  if (dec.info() != Eigen::Success) throw NumericalError("singular_values: svd did not converge");
  return dec.singularValues();
}

Index numerical_rank(const Vector& sigma, double rel_tol) {
  if (sigma.size() == 0 || sigma(0) <= 0.0) return 0;
  const double cut = rel_tol * sigma(0);
  Index r = 0;
  while (r < sigma.size() && sigma(r) > cut) ++r;
  return r;
}

Matrix LambdaQr::solve_r(const MatrixRef& M) const {
  if (singular) throw NumericalError("lambda-QR factor R is singular (lambda = 0, rank-deficient input)");
  return R.triangularView<Eigen::Upper>().solve(M);
}

Matrix LambdaQr::r_inverse() const {
  return solve_r(Matrix::Identity(R.rows(), R.cols()));
}

LambdaQr lambda_qr(const MatrixRef& A, double lambda) {
  if (lambda < 0.0 || !std::isfinite(lambda)) throw ContractError("lambda_qr: lambda must be finite and >= 0");
  require_dims(A.rows() >= 1, "lambda_qr: A needs at least one row");
  const Index n = A.rows();
  const Index d = A.cols();

  Matrix stacked(n + d, d);
  stacked.topRows(n) = A;
  stacked.bottomRows(d) = std::sqrt(lambda) * Matrix::Identity(d, d);

  Eigen::HouseholderQR<Matrix> qr(stacked);
  LambdaQr out;
  out.lambda = lambda;
  out.R = qr.matrixQR().topRows(std::min(n + d, d)).triangularView<Eigen::Upper>();
  Vector signs = out.R.diagonal().unaryExpr([](double v) { return v < 0.0 ? -1.0 : 1.0; });
  out.R = signs.asDiagonal() * out.R;

  const double max_diag = d ? out.R.diagonal().cwiseAbs().maxCoeff() : 0.0;
  const double min_diag = d ? out.R.diagonal().cwiseAbs().minCoeff() : 0.0;
  out.singular = d > 0 && (max_diag == 0.0 || min_diag <= 1e-12 * max_diag);

  if (!out.singular) {
    // Q = A R^{-1}  <=>  R^T Q^T = A^T
    out.Q = out.R.transpose().triangularView<Eigen::Lower>().solve(A.transpose()).transpose();
  } else {
    Matrix thin = qr.householderQ() * Matrix::Identity(n + d, d);
    out.Q = thin.topRows(n) * signs.asDiagonal();
  }
  return out;
}

Matrix pinv_apply(const MatrixRef& M, const MatrixRef& B, double rel_tol) {
  require_dims(M.rows() == B.rows(), "pinv_apply: row counts of M and B differ");
  const SvdFactors f = svd(M, false);
  const Index r = numerical_rank(f.sigma, rel_tol);
  Matrix coeffs = f.U.leftCols(r).transpose() * B;
  for (Index i = 0; i < r; ++i) coeffs.row(i) /= f.sigma(i);
  return f.V.leftCols(r) * coeffs;
}

Matrix ColumnBasis::lift(const MatrixRef& Zp) const {
  require_dims(Zp.rows() == rank, "ColumnBasis::lift: coefficient rows must equal the basis rank");
  Matrix Z = Matrix::Zero(n_cols, Zp.cols());
  if (rank > 0) Z.topRows(rank) = T.triangularView<Eigen::Upper>().solve(Zp);
  return perm * Z;
}

ColumnBasis column_basis(const MatrixRef& C, double rel_tol) {
  ColumnBasis out;
  out.n_cols = C.cols();
  if (C.rows() == 0 || C.cols() == 0) {
    out.Q = Matrix(C.rows(), 0);
    out.T = Matrix(0, 0);
    out.perm.setIdentity(C.cols());
    return out;
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(C);
  qr.setThreshold(rel_tol);
  out.rank = qr.rank();
  out.perm = qr.colsPermutation();
  const Index r = out.rank;
  out.Q = qr.householderQ() * Matrix::Identity(C.rows(), r);
  out.T = qr.matrixR().topLeftCorner(r, r).triangularView<Eigen::Upper>();
  return out;
}

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  Matrix G(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) G(i, j) = rng.normal();
  return G;
}

Matrix random_orthonormal(Index n, Index k, Rng& rng) {
  require_dims(k <= n, "random_orthonormal: k must not exceed n");
  const Matrix G = gaussian_matrix(n, k, rng);
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ() * Matrix::Identity(n, k);
  for (Index j = 0; j < k; ++j)
    if (qr.matrixQR()(j, j) < 0.0) Q.col(j) *= -1.0;
  return Q;
}

double spectral_norm_estimate(const MatrixRef& A, int iterations, Rng& rng) {
  if (A.size() == 0) return 0.0;
  Vector v(A.cols());
  for (Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
  v.normalize();
  double est = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const Vector Av = A * v;
    est = Av.norm();
    Vector w = A.transpose() * Av;
    const double nw = w.norm();
    if (nw == 0.0) return est;
    v = w / nw;
  }
  return (A * v).norm();
}

} // namespace sketchreg
