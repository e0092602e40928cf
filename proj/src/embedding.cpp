#include "sketchreg/embedding.hpp"

#include "sketchreg/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace sketchreg {

std::string to_string(EmbedCondition c) {
  switch (c) {
  case EmbedCondition::ProdU1: return "prodU1";
  case EmbedCondition::ProdVec: return "prodVec";
  case EmbedCondition::Subspace: return "subspace";
  case EmbedCondition::Affine: return "affine";
  case EmbedCondition::SpecAmm: return "specAMM";
  }
  return "unknown";
}

namespace {

// Spectral norm of a symmetric matrix.
double sym_norm2(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double norm2(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  return singular_values(M)(0);
}

void finish(EmbedReport& r) {
  r.trials = static_cast<int>(r.deviations.size());
  r.passes = 0;
  r.deviation = 0.0;
  for (double d : r.deviations) {
    if (d <= r.threshold) ++r.passes;
    r.deviation = std::max(r.deviation, d);
  }
  r.pass = r.passes >= static_cast<int>(std::ceil(r.required_fraction * r.trials - 1e-12));
}

} // namespace

Matrix ridge_leverage_basis(const MatrixRef& A, double lambda) {
  const SvdFactors f = svd(A, false);
  Vector scale(f.sigma.size());
  for (Index i = 0; i < scale.size(); ++i) {
    const double s = f.sigma(i);
    scale(i) = s > 0.0 ? s / std::sqrt(s * s + lambda) : 0.0;
  }
  return f.U * scale.asDiagonal();
}

EmbedReport check_subspace_embedding(const SketchSpec& spec, const MatrixRef& A, double eps, int trials, Rng& rng,
                                     double required_fraction) {
  EmbedReport rep;
  rep.condition = EmbedCondition::Subspace;
  rep.threshold = eps;
  rep.required_fraction = required_fraction;
  const SvdFactors f = svd(A, false);
  const Index r = numerical_rank(f.sigma);
  if (r == 0) {
    rep.deviations.assign(static_cast<std::size_t>(trials), 0.0);
    rep.note = "A = 0: trivially embedded";
    finish(rep);
    return rep;
  }
  const Matrix U = f.U.leftCols(r);
  const Matrix gram = U.transpose() * U;
  for (int t = 0; t < trials; ++t) {
    const Matrix SU = apply(reseed(spec, rng.next_u64()), U);
    rep.deviations.push_back(sym_norm2(SU.transpose() * SU - gram));
  }
  finish(rep);
  return rep;
}

EmbedReport check_affine_embedding(const SketchSpec& spec, const MatrixRef& A, const MatrixRef& B, double eps,
                                   int trials, Rng& rng, double required_fraction) {
  require_dims(A.rows() == B.rows(), "check_affine_embedding: A and B row counts differ");
  EmbedReport rep;
  rep.condition = EmbedCondition::Affine;
  rep.threshold = eps;
  rep.required_fraction = required_fraction;
  rep.note = "falsifier over X*, 0 and 50 random X; not a certificate for all X";

  const Matrix Xstar = pinv_apply(A, B);
  std::vector<Matrix> candidates{Xstar, Matrix::Zero(A.cols(), B.cols())};
  Rng xr = rng.split(0xAFF1);
  const double xs = Xstar.norm();
  for (int j = 0; j < 50; ++j) {
    Matrix G = gaussian_matrix(A.cols(), B.cols(), xr);
    const double base = xs > 0.0 ? xs : 1.0;
    const double scale = base * std::pow(10.0, -2.0 + 4.0 * xr.uniform()) / std::max(G.norm(), 1e-300);
    candidates.push_back(Xstar + scale * G);
  }
  std::vector<Matrix> residuals;
  std::vector<double> norms;
  const double floor = 1e-24 * std::max(1.0, B.squaredNorm());
  for (const auto& X : candidates) {
    Matrix E = A * X - B;
    const double e2 = E.squaredNorm();
    if (e2 <= floor) continue;
    residuals.push_back(std::move(E));
    norms.push_back(e2);
  }
  for (int t = 0; t < trials; ++t) {
    const SketchSpec st = reseed(spec, rng.next_u64());
    double worst = 0.0;
    for (std::size_t c = 0; c < residuals.size(); ++c) {
      const double s2 = apply(st, residuals[c]).squaredNorm();
      worst = std::max(worst, std::abs(s2 / norms[c] - 1.0));
    }
    rep.deviations.push_back(worst);
  }
  finish(rep);
  return rep;
}

std::pair<EmbedReport, EmbedReport> check_ridge_conditions(const SketchSpec& spec, const MatrixRef& A,
                                                           const MatrixRef& b, double lambda, double eps,
                                                           int trials, Rng& rng, double required_fraction) {
  require_dims(A.rows() == b.rows(), "check_ridge_conditions: A and b row counts differ");
  if (lambda < 0.0) throw ContractError("check_ridge_conditions: lambda must be >= 0");
  const SvdFactors f = svd(A, false);
  Vector u1_scale(f.sigma.size()), x_scale(f.sigma.size());
  for (Index i = 0; i < f.sigma.size(); ++i) {
    const double s = f.sigma(i);
    const bool live = s > 1e-14 * (f.sigma.size() ? f.sigma(0) : 0.0) && s > 0.0;
    u1_scale(i) = live ? s / std::sqrt(s * s + lambda) : 0.0;
    x_scale(i) = live ? s / (s * s + lambda) : 0.0;
  }
  const Matrix U1 = f.U * u1_scale.asDiagonal();
  const Matrix xstar = f.V * (x_scale.asDiagonal() * (f.U.transpose() * b));
  const Matrix resid = b - A * xstar;
  const double delta = resid.squaredNorm() + lambda * xstar.squaredNorm();

  EmbedReport gram;
  gram.condition = EmbedCondition::ProdU1;
  gram.threshold = 0.25;
  gram.required_fraction = required_fraction;
  EmbedReport prod;
  prod.condition = EmbedCondition::ProdVec;
  prod.threshold = std::sqrt(eps * delta / 2.0) + 1e-12 * std::max(1.0, b.norm());
  prod.required_fraction = required_fraction;

  Matrix joint(A.rows(), U1.cols() + resid.cols());
  joint << U1, resid;
  const Matrix g0 = U1.transpose() * U1;
  const Matrix p0 = U1.transpose() * resid;
  for (int t = 0; t < trials; ++t) {
    const Matrix SJ = apply(reseed(spec, rng.next_u64()), joint);
    const auto SU1 = SJ.leftCols(U1.cols());
    const auto Sr = SJ.rightCols(resid.cols());
    gram.deviations.push_back(sym_norm2(SU1.transpose() * SU1 - g0));
    prod.deviations.push_back((SU1.transpose() * Sr - p0).norm());
  }
  finish(gram);
  finish(prod);
  return {gram, prod};
}

EmbedReport check_spectral_product(const SketchSpec& spec, const MatrixRef& C, const MatrixRef& D,
                                   double eps_prime, int trials, Rng& rng, double required_fraction) {
  require_dims(C.rows() == D.rows(), "check_spectral_product: C and D row counts differ");
  EmbedReport rep;
  rep.condition = EmbedCondition::SpecAmm;
  rep.threshold = eps_prime;
  rep.required_fraction = required_fraction;
  const double scale = norm2(C) * norm2(D);
  Matrix joint(C.rows(), C.cols() + D.cols());
  joint << C, D;
  const Matrix exact = C.transpose() * D;
  for (int t = 0; t < trials; ++t) {
    const Matrix SJ = apply(reseed(spec, rng.next_u64()), joint);
    const Matrix approx = SJ.leftCols(C.cols()).transpose() * SJ.rightCols(D.cols());
    rep.deviations.push_back(scale > 0.0 ? norm2(approx - exact) / scale : 0.0);
  }
  finish(rep);
  return rep;
}

} // namespace sketchreg
