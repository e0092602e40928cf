#include "sketchreg/ridge.hpp"

#include "sketchreg/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <chrono>
#include <cmath>
#include <limits>

namespace sketchreg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Direct {
  Matrix x;
  bool min_norm = false;
};

Direct direct_solve(const MatrixRef& A, const MatrixRef& B, double lambda) {
  const Index n = A.rows();
  const Index d = A.cols();
  Direct out;
  if (lambda == 0.0) {
    out.x = pinv_apply(A, B);
    out.min_norm = numerical_rank(singular_values(A), 1e-12) < d;
    return out;
  }
  if (d <= n) {
    Matrix stacked = Matrix::Zero(n + d, d);
    stacked.topRows(n) = A;
    stacked.bottomRows(d).diagonal().setConstant(std::sqrt(lambda));
    Matrix rhs = Matrix::Zero(n + d, B.cols());
    rhs.topRows(n) = B;
    out.x = Eigen::HouseholderQR<Matrix>(stacked).solve(rhs);
  } else {
    Matrix K = A * A.transpose();
    K.diagonal().array() += lambda;
    Eigen::LLT<Matrix> llt(K);
    if (llt.info() != Eigen::Success) throw NumericalError("solve_exact: A A^T + lambda I is not positive definite");
    out.x = A.transpose() * llt.solve(B);
  }
  return out;
}

void apply_guard(const RidgeProblem& p, RidgeSolution& sol) {
  const double zero_obj = p.rhs.squaredNorm();
  if (sol.objective > zero_obj) {
    sol.x = Matrix::Zero(p.A.cols(), p.rhs.cols());
    sol.objective = zero_obj;
    sol.guard_applied = true;
  }
}

RidgeSolution rows_once(const RidgeProblem& p, const SketchSpec& S, const char* method) {
  const auto t0 = Clock::now();
  RidgeSolution sol;
  sol.method = method;
  sol.sketches = {S};
  Matrix joint(p.A.rows(), p.A.cols() + p.rhs.cols());
  joint << p.A, p.rhs;
  const Matrix SJ = apply(S, joint);
  sol.sketch_rows = SJ.rows();
  sol.sketch_seconds = seconds_since(t0);
  const auto t1 = Clock::now();
  const Direct dsol = direct_solve(SJ.leftCols(p.A.cols()), SJ.rightCols(p.rhs.cols()), p.lambda);
  sol.solve_seconds = seconds_since(t1);
  sol.x = dsol.x;
  sol.min_norm = dsol.min_norm;
  sol.objective = ridge_objective(p, sol.x);
  apply_guard(p, sol);
  sol.wall_seconds = seconds_since(t0);
  return sol;
}

template <class Once>
RidgeSolution best_of(const SketchSpec& S, const SketchedRidgeOptions& opts, Once once) {
  if (opts.repeats < 1) throw ContractError("repeats must be >= 1");
  RidgeSolution best = once(S);
  double total = best.wall_seconds;
  for (int t = 1; t < opts.repeats; ++t) {
    RidgeSolution cand = once(reseed(S, static_cast<std::uint64_t>(t)));
    total += cand.wall_seconds;
    if (cand.objective < best.objective) best = std::move(cand);
  }
  best.wall_seconds = total;
  return best;
}

} // namespace

void RidgeProblem::validate() const {
  require_dims(A.rows() == rhs.rows(), "RidgeProblem: A and rhs row counts differ");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ContractError("RidgeProblem: lambda must be finite and >= 0");
}

double ridge_objective(const MatrixRef& A, const MatrixRef& rhs, double lambda, const MatrixRef& x) {
  return (A * x - rhs).squaredNorm() + lambda * x.squaredNorm();
}

RidgeSolution solve_exact(const RidgeProblem& p) {
  p.validate();
  const auto t0 = Clock::now();
  RidgeSolution sol;
  sol.method = "exact";
  const Direct d = direct_solve(p.A, p.rhs, p.lambda);
  sol.x = d.x;
  sol.min_norm = d.min_norm;
  sol.objective = ridge_objective(p, sol.x);
  sol.solve_seconds = sol.wall_seconds = seconds_since(t0);
  return sol;
}

RidgeSolution solve_sketched_rows(const RidgeProblem& p, const SketchSpec& s1, const std::optional<SketchSpec>& s2,
                                  const SketchedRidgeOptions& opts) {
  p.validate();
  const SketchSpec S = s2 ? compose(*s2, s1) : s1;
  return best_of(S, opts, [&](const SketchSpec& s) { return rows_once(p, s, "sketched_rows"); });
}

RidgeSolution solve_sketched_mr(const RidgeProblem& p, const SketchSpec& s1, const std::optional<SketchSpec>& s2,
                                const SketchedRidgeOptions& opts) {
  p.validate();
  const SketchSpec S = s2 ? compose(*s2, s1) : s1;
  return best_of(S, opts, [&](const SketchSpec& s) { return rows_once(p, s, "sketched_mr"); });
}

RidgeSolution solve_sketched_cols(const RidgeProblem& p, const SketchSpec& spec, const SketchedRidgeOptions& opts) {
  p.validate();
  if (!(p.lambda > 0.0)) throw ContractError("solve_sketched_cols: lambda must be > 0");
  const SketchSpec S = with_side(spec, Side::Left);
  const Matrix At = p.A.transpose();
  const Matrix c = p.A * (At * p.rhs);
  return best_of(S, opts, [&](const SketchSpec& s) {
    const auto t0 = Clock::now();
    RidgeSolution sol;
    sol.method = "sketched_cols";
    sol.sketches = {s};
    const Matrix B = apply(s, At);
    sol.sketch_rows = B.rows();
    sol.sketch_seconds = seconds_since(t0);
    const auto t1 = Clock::now();
    const Matrix G = B.transpose() * B;
    const Matrix M = p.lambda * G + G * G;
    const Matrix y = pinv_apply(M, c);
    sol.x = At * y;
    sol.solve_seconds = seconds_since(t1);
    sol.objective = ridge_objective(p, sol.x);
    apply_guard(p, sol);
    sol.wall_seconds = seconds_since(t0);
    return sol;
  });
}

SketchSpec tall_ridge_sketch(const SizePolicy& policy, double sd_hat, double eps, Index n, std::uint64_t seed) {
  const Index m1 = recommend_size(policy, sd_hat, eps, SizePurpose::RidgeRows);
  const Index m2 = recommend_size(policy, sd_hat, eps, SizePurpose::RidgeRowsSrht);
  const SketchSpec s1 = clamp_to_input(SketchSpec::count_sketch(m1, derive_seed(seed, 1)), n);
  const Index inner = s1.is_identity() ? n : m1;
  if (m2 >= inner) return s1;
  const SketchSpec s2 = SketchSpec::srht(m2, derive_seed(seed, 2));
  return s1.is_identity() ? s2 : compose(s2, s1);
}

WideSizing wide_ridge_sketch(const SizePolicy& policy, const MatrixRef& A, double lambda, double eps,
                             std::uint64_t seed) {
  if (!(lambda > 0.0)) throw ContractError("wide_ridge_sketch: lambda must be > 0");
  WideSizing w;
  Rng rng(seed, 7);
  w.sigma1_estimate = 1.1 * spectral_norm_estimate(A, 10, rng);
  w.eps_prime = (eps / 2.0) / (1.0 + 3.0 * w.sigma1_estimate * w.sigma1_estimate / lambda);
  w.m = recommend_size(policy, static_cast<double>(A.rows()), w.eps_prime, SizePurpose::RidgeCols);
  w.spec = staged_sketch(policy, w.m, A.cols(), seed, Side::Left);
  w.clamped = w.spec.is_identity();
  return w;
}

} // namespace sketchreg
