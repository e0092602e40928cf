#include "sketchreg/lowrank.hpp"

#include "sketchreg/linalg.hpp"
#include "sketchreg/rng.hpp"
#include "sketchreg/statdim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace sketchreg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

} // namespace

double lowrank_objective(const MatrixRef& A, const MatrixRef& Y, const MatrixRef& X, double lambda) {
  return (Y * X - A).squaredNorm() + lambda * (Y.squaredNorm() + X.squaredNorm());
}

LowRankFactors shrink_padded(const MatrixRef& A, Index k, double lambda) {
  if (k < 0) throw ContractError("shrink: k must be >= 0");
  if (lambda < 0.0) throw ContractError("shrink: lambda must be >= 0");
  LowRankFactors out;
  out.k = k;
  out.lambda = lambda;
  out.Y = Matrix::Zero(A.rows(), k);
  out.X = Matrix::Zero(k, A.cols());
  const SvdFactors f = svd(A, false);
  const Index kk = std::min<Index>(k, f.sigma.size());
  out.rank_deficient = kk < k;
  for (Index i = 0; i < kk; ++i) {
    const double s = f.sigma(i);
    if (s > lambda) {
      const double w = std::sqrt(s - lambda);
      out.Y.col(i) = w * f.U.col(i);
      out.X.row(i) = w * f.V.col(i).transpose();
      out.sd += 1.0 - lambda / s;
    }
  }
  out.objective = lowrank_objective(A, out.Y, out.X, lambda);
  return out;
}

LowRankFactors solve_exact_shrink(const MatrixRef& A, Index k, double lambda) {
  if (k < 1 || k > std::min(A.rows(), A.cols())) throw ContractError("solve_exact_shrink: need 1 <= k <= min(n, d)");
  return shrink_padded(A, k, lambda);
}

LowRankSketches LowRankSketches::identity() {
  return {SketchSpec::identity(Side::Left), SketchSpec::identity(Side::Right), SketchSpec::identity(Side::Left),
          SketchSpec::identity(Side::Right)};
}

LowRankSizes lowrank_sizes(const SizePolicy& policy, double sd_hat, Index k, double eps) {
  LowRankSizes s;
  s.sd_hat = std::min(sd_hat, static_cast<double>(k));
  s.m = recommend_size(policy, s.sd_hat, eps, SizePurpose::LowrankS);
  s.m_prime = recommend_size(policy, s.sd_hat, eps, SizePurpose::LowrankR, k);
  s.p = recommend_size(policy, static_cast<double>(s.m_prime), eps, SizePurpose::LowrankS2);
  s.p_prime = recommend_size(policy, static_cast<double>(s.m), eps, SizePurpose::LowrankR2);
  return s;
}

LowRankSketches plan_lowrank_sketches(const SizePolicy& policy, const LowRankSizes& sizes, Index n, Index d,
                                      std::uint64_t seed) {
  return {staged_sketch(policy, sizes.m, n, derive_seed(seed, 11), Side::Left),
          staged_sketch(policy, sizes.m_prime, d, derive_seed(seed, 12), Side::Right),
          staged_sketch(policy, sizes.p, n, derive_seed(seed, 13), Side::Left),
          staged_sketch(policy, sizes.p_prime, d, derive_seed(seed, 14), Side::Right)};
}

CorePieces build_core(const MatrixRef& A, const LowRankSketches& sk) {
  CorePieces c;
  c.sketches = sk;
  c.SA = apply(sk.S, A, &c.stats);
  c.AR = apply(sk.R, A, &c.stats);
  c.S2AR = apply(sk.S2, c.AR, &c.stats);
  c.SAR2 = apply(sk.R2, c.SA, &c.stats);
  c.S2AR2 = apply_two_sided(sk.S2, A, sk.R2, &c.stats);
  return c;
}

CoreSolution solve_core(const MatrixRef& C, const MatrixRef& D, const MatrixRef& G, Index k, double lambda) {
  require_dims(G.rows() == C.rows() && G.cols() == D.cols(), "solve_core: G must be rows(C) x cols(D)");
  if (k < 1) throw ContractError("solve_core: k must be >= 1");
  const ColumnBasis bc = column_basis(C);
  const ColumnBasis bd = column_basis(D.transpose());
  CoreSolution out;
  out.U_C = bc.Q;
  out.U_D = bd.Q;
  const Matrix M = bc.Q.transpose() * G * bd.Q;
  const LowRankFactors small = shrink_padded(M, k, lambda);
  out.rank_deficient = small.rank_deficient;
  out.Zp_R = small.Y;
  out.Zp_S = small.X;
  out.Z_R = bc.lift(small.Y);
  out.Z_S = bd.lift(small.X.transpose()).transpose();
  return out;
}

LowRankFactors solve_sketched(const MatrixRef& A, Index k, double lambda, const LowRankSketches& sketches) {
  if (k < 1 || k > std::min(A.rows(), A.cols())) throw ContractError("solve_sketched: need 1 <= k <= min(n, d)");
  if (lambda < 0.0) throw ContractError("solve_sketched: lambda must be >= 0");
  const auto t0 = Clock::now();
  const CorePieces c = build_core(A, sketches);
  const double t_sketch = seconds_since(t0);
  const auto t1 = Clock::now();
  const CoreSolution core = solve_core(c.S2AR, c.SAR2, c.S2AR2, k, lambda);
  LowRankFactors out;
  out.k = k;
  out.lambda = lambda;
  out.Y = c.AR * core.Z_R;
  out.X = core.Z_S * c.SA;
  out.rank_deficient = core.rank_deficient;
  out.objective = lowrank_objective(A, out.Y, out.X, lambda);
  out.sketches = {sketches.S, sketches.R, sketches.S2, sketches.R2};
  out.sketch_seconds = t_sketch;
  out.solve_seconds = seconds_since(t1);
  return out;
}

LowRankFactors solve_sketched(const MatrixRef& A, Index k, double lambda, double eps, const SizePolicy& policy,
                              std::uint64_t seed, const LowRankOptions& opts) {
  if (opts.transpose_dispatch && A.cols() > A.rows()) {
    LowRankOptions inner = opts;
    inner.transpose_dispatch = false;
    const Matrix At = A.transpose();
    LowRankFactors t = solve_sketched(At, k, lambda, eps, policy, seed, inner);
    std::swap(t.Y, t.X);
    t.Y.transposeInPlace();
    t.X.transposeInPlace();
    return t;
  }
  double sd_hat = 0.0;
  if (opts.sd_hat) {
    sd_hat = *opts.sd_hat;
  } else if (lambda > 0.0) {
    Rng rng(seed, 21);
    sd_hat = sd_estimate(A, lambda, rng).estimate;
  } else {
    sd_hat = static_cast<double>(k);
  }
  const LowRankSizes sizes = lowrank_sizes(policy, sd_hat, k, eps);
  return solve_sketched(A, k, lambda, plan_lowrank_sketches(policy, sizes, A.rows(), A.cols(), seed));
}

} // namespace sketchreg
