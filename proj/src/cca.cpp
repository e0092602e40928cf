#include "sketchreg/cca.hpp"

#include "sketchreg/linalg.hpp"
#include "sketchreg/rng.hpp"
#include "sketchreg/statdim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace sketchreg {

CcaResult solve_exact_cca(const MatrixRef& A, const MatrixRef& B, double lambda1, double lambda2) {
  require_dims(A.rows() == B.rows(), "cca: A and B row counts differ");
  if (lambda1 < 0.0 || lambda2 < 0.0) throw ContractError("cca: lambdas must be >= 0");
  const auto t0 = std::chrono::steady_clock::now();
  const LambdaQr qa = lambda_qr(A, lambda1);
  const LambdaQr qb = lambda_qr(B, lambda2);
  if (qa.singular || qb.singular)
    throw NumericalError("cca: R is singular (lambda = 0 with a rank-deficient input)");
  const SvdFactors f = svd(qa.Q.transpose() * qb.Q, false);
  CcaResult r;
  r.lambda1 = lambda1;
  r.lambda2 = lambda2;
  r.q = std::min(A.cols(), B.cols());
  r.sigmas = f.sigma.head(r.q);
  r.U = qa.solve_r(f.U.leftCols(r.q));
  r.V = qb.solve_r(f.V.leftCols(r.q));
  r.unregularized = lambda1 == 0.0 || lambda2 == 0.0;
  r.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

CcaResult solve_sketched_cca(const MatrixRef& A, const MatrixRef& B, double lambda1, double lambda2,
                             const SketchSpec& spec) {
  require_dims(A.rows() == B.rows(), "cca: A and B row counts differ");
  const auto t0 = std::chrono::steady_clock::now();
  Matrix joint(A.rows(), A.cols() + B.cols());
  joint << A, B;
  const Matrix SJ = apply(spec, joint);
  const double t_sketch = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CcaResult r = solve_exact_cca(SJ.leftCols(A.cols()), SJ.rightCols(B.cols()), lambda1, lambda2);
  r.sketches = {spec};
  r.sketch_seconds = t_sketch;
  return r;
}

SketchSpec cca_sketch(const SizePolicy& policy, const MatrixRef& A, const MatrixRef& B, double lambda1,
                      double lambda2, double eps, std::uint64_t seed, double* sd_hat_out) {
  Rng rng(seed, 31);
  const double sa = lambda1 > 0.0 ? sd_estimate(A, lambda1, rng).estimate : static_cast<double>(A.cols());
  const double sb = lambda2 > 0.0 ? sd_estimate(B, lambda2, rng).estimate : static_cast<double>(B.cols());
  const double sd = std::max(sa, sb);
  if (sd_hat_out) *sd_hat_out = sd;
  const Index m = recommend_size(policy, sd, eps, SizePurpose::Cca);
  return clamp_to_input(SketchSpec::count_sketch(m, derive_seed(seed, 1)), A.rows());
}

double cca_constraint_residual(const MatrixRef& A, double lambda, const MatrixRef& U) {
  const Matrix AU = A * U;
  Matrix M = AU.transpose() * AU + lambda * U.transpose() * U;
  M.diagonal().array() -= 1.0;
  return M.size() ? M.cwiseAbs().maxCoeff() : 0.0;
}

CcaValidation validate_cca(const MatrixRef& A, const MatrixRef& B, double lambda1, double lambda2,
                           const CcaResult& cand, const CcaResult& exact, double eta) {
  require_dims(cand.q == exact.q, "validate_cca: candidate and exact differ in q");
  CcaValidation v;
  v.eta = eta;
  const Index q = exact.q;
  for (Index i = 0; i < q; ++i) v.max_sigma_dev = std::max(v.max_sigma_dev, std::abs(cand.sigmas(i) - exact.sigmas(i)));
  v.max_constraint_dev =
      std::max(cca_constraint_residual(A, lambda1, cand.U), cca_constraint_residual(B, lambda2, cand.V));
  const Matrix AtB = A.transpose() * B;
  const Matrix cross_c = cand.U.transpose() * AtB * cand.V;
  const Matrix cross_e = exact.U.transpose() * AtB * exact.V;
  for (Index i = 0; i < q; ++i)
    v.max_alignment_dev = std::max(v.max_alignment_dev, std::abs(cross_c(i, i) - exact.sigmas(i)));
  double tc = 0.0, te = 0.0;
  for (Index L = 1; L <= q; ++L) {
    tc += cross_c(L - 1, L - 1);
    te += cross_e(L - 1, L - 1);
    v.trace_gap.push_back(tc - te);
  }
  v.pass = v.max_sigma_dev <= eta && v.max_constraint_dev <= eta && v.max_alignment_dev <= eta;
  return v;
}

} // namespace sketchreg
