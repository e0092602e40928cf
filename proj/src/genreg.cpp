#include "sketchreg/genreg.hpp"

#include "sketchreg/linalg.hpp"
#include "sketchreg/ridge.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sketchreg {

double FitTerm::operator()(const MatrixRef& E) const {
  const double v = schatten_norm(E, p);
  return squared ? v * v : v;
}

std::string to_string(DiagVariant v) {
  switch (v) {
  case DiagVariant::FrobTrace: return "frob+trace";
  case DiagVariant::FrobFrobYX: return "frob+frobYX";
  case DiagVariant::SchattenTrace: return "schattenp+trace";
  }
  return "unknown";
}

DiagVariant diag_variant_from_string(const std::string& name) {
  for (auto v : {DiagVariant::FrobTrace, DiagVariant::FrobFrobYX, DiagVariant::SchattenTrace})
    if (to_string(v) == name) return v;
  throw std::invalid_argument("unknown diagonal variant '" + name + "'");
}

namespace {

double p_norm(const Vector& v, double p) {
  if (v.size() == 0) return 0.0;
  if (std::isinf(p)) return v.cwiseAbs().maxCoeff();
  if (p == 2.0) return v.norm();
  if (p == 1.0) return v.cwiseAbs().sum();
  return std::pow(v.cwiseAbs().array().pow(p).sum(), 1.0 / p);
}

// ||(min(alpha, sigma), tail)||_p + lambda sum (sigma - alpha)_+
double schatten_trace_objective(const Vector& sigma, const Vector& tail, double lambda, double p, double alpha) {
  Vector resid(sigma.size() + tail.size());
  resid << sigma.cwiseMin(alpha), tail;
  const double trace = (sigma.array() - alpha).cwiseMax(0.0).sum();
  return p_norm(resid, p) + lambda * trace;
}

Vector shrink_sqrt(const Vector& sigma, double alpha) {
  return (sigma.array() - alpha).cwiseMax(0.0).sqrt();
}

} // namespace

DiagSolution diag_solver_shrink(const Vector& sigma_k, double lambda, DiagVariant variant, double p,
                                const Vector& tail) {
  if (lambda < 0.0) throw ContractError("diag_solver_shrink: lambda must be >= 0");
  for (Index i = 0; i < sigma_k.size(); ++i) {
    if (sigma_k(i) < 0.0 || (i > 0 && sigma_k(i) > sigma_k(i - 1)))
      throw ContractError("diag_solver_shrink: sigma must be nonnegative and nonincreasing");
  }
  DiagSolution sol;
  switch (variant) {
  case DiagVariant::FrobTrace:
    sol.alpha = lambda;
    sol.w = shrink_sqrt(sigma_k, lambda);
    break;
  case DiagVariant::FrobFrobYX:
    sol.w = (sigma_k / (1.0 + lambda)).cwiseSqrt();
    break;
  case DiagVariant::SchattenTrace: {
    const double hi = sigma_k.size() ? sigma_k(0) : 0.0;
    if (hi <= 0.0) {
      sol.w = Vector::Zero(sigma_k.size());
      break;
    }
    auto g = [&](double a) { return schatten_trace_objective(sigma_k, tail, lambda, p, a); };
    constexpr int grid = 400;
    std::vector<double> vals(grid + 1);
    int best = 0;
    for (int i = 0; i <= grid; ++i) {
      vals[static_cast<std::size_t>(i)] = g(hi * i / grid);
      if (vals[static_cast<std::size_t>(i)] < vals[static_cast<std::size_t>(best)]) best = i;
    }
    const double scale = 1.0 + std::abs(vals[0]);
    for (int i = 1; i < grid; ++i) {
      const auto u = static_cast<std::size_t>(i);
      if (vals[u - 1] - 2.0 * vals[u] + vals[u + 1] < -1e-9 * scale) sol.convex = false;
    }
    double a = hi * std::max(best - 1, 0) / grid;
    double b = hi * std::min(best + 1, grid) / grid;
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double gc = g(c), gd = g(d);
    while (b - a > 1e-10 * (1.0 + hi)) {
      if (gc <= gd) {
        b = d;
        d = c;
        gd = gc;
        c = b - invphi * (b - a);
        gc = g(c);
      } else {
        a = c;
        c = d;
        gc = gd;
        d = a + invphi * (b - a);
        gd = g(d);
      }
    }
    double alpha = 0.5 * (a + b);
    // The grid minimum may sit at an endpoint where the search cannot improve.
    const double grid_alpha = hi * best / grid;
    if (g(grid_alpha) < g(alpha)) alpha = grid_alpha;
    sol.alpha = alpha;
    sol.w = shrink_sqrt(sigma_k, alpha);
    break;
  }
  }
  sol.z = sol.w;
  return sol;
}

DiagSolver make_diag_solver(double lambda, DiagVariant variant, double p) {
  return [=](const Vector& sigma_k, const Vector& tail) {
    return diag_solver_shrink(sigma_k, lambda, variant, p, tail);
  };
}

FitTerm variant_fit(DiagVariant variant, double p) {
  if (variant == DiagVariant::SchattenTrace) return {p, false};
  return {2.0, true};
}

PairMeasure variant_pair(DiagVariant variant, double lambda) {
  switch (variant) {
  case DiagVariant::FrobTrace: return pair_sum(frobenius_sq(lambda), frobenius_sq(lambda));
  case DiagVariant::FrobFrobYX: return pair_product(frobenius_sq(lambda));
  case DiagVariant::SchattenTrace: return pair_product(nuclear(lambda));
  }
  throw std::invalid_argument("variant_pair: unknown variant");
}

void require_lowrank_flags(const PairMeasure& f) {
  const auto& l = f.left;
  const auto& r = f.right;
  if (!(l.padding && l.loi && l.left_contraction))
    throw ContractError("pair measure '" + f.name +
                        "': needs padding invariance, left orthogonal invariance and left contraction in Y");
  if (!(r.padding && r.roi && r.right_contraction))
    throw ContractError("pair measure '" + f.name +
                        "': needs padding invariance, right orthogonal invariance and right contraction in X");
}

GeneralLowRank solve_diag_reduction(const MatrixRef& A, Index k, const PairMeasure& f, const FitTerm& fit,
                                    const DiagSolver& solver) {
  require_lowrank_flags(f);
  if (k < 1) throw ContractError("solve_diag_reduction: k must be >= 1");
  const SvdFactors s = svd(A, false);
  const Index kk = std::min<Index>(k, s.sigma.size());
  Vector sigma_k = Vector::Zero(k);
  sigma_k.head(kk) = s.sigma.head(kk);
  GeneralLowRank out;
  out.diag = solver(sigma_k, s.sigma.tail(s.sigma.size() - kk));
  require_dims(out.diag.w.size() == k && out.diag.z.size() == k, "solve_diag_reduction: solver returned wrong size");
  out.Y = Matrix::Zero(A.rows(), k);
  out.X = Matrix::Zero(k, A.cols());
  out.Y.leftCols(kk) = s.U.leftCols(kk) * out.diag.w.head(kk).asDiagonal();
  out.X.topRows(kk) = out.diag.z.head(kk).asDiagonal() * s.V.leftCols(kk).transpose();
  out.singular_core = (out.diag.w.array() == 0.0).any() || (out.diag.z.array() == 0.0).any();
  out.objective = fit(out.Y * out.X - A) + f(out.Y, out.X);
  return out;
}

GeneralLowRank solve_general_lowrank(const MatrixRef& A, Index k, const PairMeasure& f, const DiagSolver& solver,
                                     const LowRankSketches& sketches) {
  require_lowrank_flags(f);
  if (k < 1) throw ContractError("solve_general_lowrank: k must be >= 1");
  const CorePieces c = build_core(A, sketches);
  const ColumnBasis left = column_basis(c.S2AR);
  const ColumnBasis right = column_basis(c.SAR2.transpose());
  const Matrix M = left.Q.transpose() * c.S2AR2 * right.Q;
  GeneralLowRank core;
  if (M.size() == 0) {
    core.Y = Matrix::Zero(M.rows(), k);
    core.X = Matrix::Zero(k, M.cols());
    core.singular_core = true;
  } else {
    core = solve_diag_reduction(M, k, f, FitTerm{}, solver);
  }
  GeneralLowRank out;
  out.diag = core.diag;
  out.singular_core = core.singular_core;
  const Matrix W = left.lift(core.Y);
  const Matrix Z = right.lift(core.X.transpose()).transpose();
  out.Y = c.AR * W;
  out.X = Z * c.SA;
  out.objective = (out.Y * out.X - A).squaredNorm() + f(out.Y, out.X);
  out.sketches = {sketches.S, sketches.R, sketches.S2, sketches.R2};
  return out;
}

GeneralLowRank solve_general_lowrank(const MatrixRef& A, Index k, const PairMeasure& f, const DiagSolver& solver,
                                     double eps, const SizePolicy& policy, std::uint64_t seed) {
  const LowRankSizes sizes = lowrank_sizes(policy, static_cast<double>(k), k, eps);
  return solve_general_lowrank(A, k, f, solver, plan_lowrank_sketches(policy, sizes, A.rows(), A.cols(), seed));
}

SmallSolver ridge_small_solver(double lambda) {
  return [lambda](const MatrixRef& A, const MatrixRef& B) {
    return solve_exact(RidgeProblem{A, B, lambda}).x;
  };
}

namespace {

Matrix prox(ProxKind kind, const Matrix& V, double tau) {
  switch (kind) {
  case ProxKind::FrobeniusSq: return V / (1.0 + 2.0 * tau);
  case ProxKind::Nuclear: {
    const SvdFactors f = svd(V, false);
    const Vector s = (f.sigma.array() - tau).cwiseMax(0.0);
    return f.U * s.asDiagonal() * f.V.transpose();
  }
  case ProxKind::VNorm1: {
    Matrix out = V;
    for (Index i = 0; i < V.rows(); ++i) {
      const double r = V.row(i).norm();
      out.row(i) *= r > tau ? 1.0 - tau / r : 0.0;
    }
    return out;
  }
  case ProxKind::VNorm2: {
    const double r = V.norm();
    return r > tau ? Matrix((1.0 - tau / r) * V) : Matrix(Matrix::Zero(V.rows(), V.cols()));
  }
  }
  return V;
}

} // namespace

MatrixMeasure prox_measure(ProxKind kind, double lambda) {
  switch (kind) {
  case ProxKind::FrobeniusSq: return frobenius_sq(lambda);
  case ProxKind::Nuclear: return nuclear(lambda);
  case ProxKind::VNorm1: return v_norm_measure(1.0, lambda);
  case ProxKind::VNorm2: return v_norm_measure(2.0, lambda);
  }
  throw std::invalid_argument("prox_measure: unknown kind");
}

Matrix proximal_gradient(const MatrixRef& A, const MatrixRef& B, ProxKind kind, double lambda,
                         const ProxOptions& opts) {
  require_dims(A.rows() == B.rows(), "proximal_gradient: A and B row counts differ");
  if (lambda < 0.0) throw ContractError("proximal_gradient: lambda must be >= 0");
  const double sigma1 = A.size() ? singular_values(A)(0) : 0.0;
  Matrix Z = Matrix::Zero(A.cols(), B.cols());
  if (sigma1 == 0.0) return Z;
  const double step = 1.0 / (2.0 * sigma1 * sigma1);
  const Matrix AtA = A.transpose() * A;
  const Matrix AtB = A.transpose() * B;
  Matrix Yk = Z;
  double t = 1.0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const Matrix grad = 2.0 * (AtA * Yk - AtB);
    Matrix Znew = prox(kind, Yk - step * grad, step * lambda);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const Matrix diff = Znew - Z;
    // Restart the momentum when it points uphill.
    if ((Yk - Znew).cwiseProduct(diff).sum() > 0.0) {
      Yk = Znew;
      t = 1.0;
    } else {
      Yk = Znew + ((t - 1.0) / t_next) * diff;
      t = t_next;
    }
    const double change = diff.norm();
    Z = std::move(Znew);
    if (change <= opts.tol * std::max(1.0, Z.norm())) break;
  }
  return Z;
}

SmallSolver proximal_small_solver(ProxKind kind, double lambda, const ProxOptions& opts) {
  return [=](const MatrixRef& A, const MatrixRef& B) { return proximal_gradient(A, B, kind, lambda, opts); };
}

RegressionSketches RegressionSketches::identity() {
  return {SketchSpec::identity(Side::Left), SketchSpec::identity(Side::Right), SketchSpec::identity(Side::Left)};
}

void require_regression_flags(const MatrixMeasure& f) {
  const auto& fl = f.flags;
  if (!(fl.padding && fl.roi && fl.right_contraction))
    throw ContractError("measure '" + f.name +
                        "': needs padding invariance, right orthogonal invariance and right contraction");
}

GeneralRegression solve_general_regression(const MatrixRef& A, const MatrixRef& B, const MatrixMeasure& f,
                                           const SmallSolver& small, const RegressionSketches& sk) {
  require_regression_flags(f);
  require_dims(A.rows() == B.rows(), "solve_general_regression: A and B row counts differ");
  const Index d = A.cols();
  Matrix AB(A.rows(), d + B.cols());
  AB << A, B;
  const Matrix SAB = apply(sk.S, AB);
  const Matrix SB = SAB.rightCols(B.cols());
  const Matrix D = apply(sk.R_hat, SB);
  const Matrix BR = apply(sk.R_hat, B);
  Matrix ABR(A.rows(), d + BR.cols());
  ABR << A, BR;
  const Matrix hat = apply(sk.S_hat, ABR);
  const auto SA_hat = hat.leftCols(d);
  const auto SBR_hat = hat.rightCols(BR.cols());

  const ColumnBasis basis = column_basis(D.transpose());
  const Matrix target = SBR_hat * basis.Q;
  GeneralRegression out;
  out.reduced_rows = SA_hat.rows();
  out.reduced_cols = target.cols();
  out.sketches = {sk.S, sk.R_hat, sk.S_hat};
  Matrix Z1 = target.cols() ? small(SA_hat, target) : Matrix(d, 0);
  out.reduced_objective = (SA_hat * Z1 - target).squaredNorm() + f(Z1);
  const Matrix Z = basis.lift(Z1.transpose()).transpose();
  out.X = Z * SB;
  out.objective = (A * out.X - B).squaredNorm() + f(out.X);
  const Matrix zero = Matrix::Zero(d, B.cols());
  const double zero_obj = B.squaredNorm() + f(zero);
  if (out.objective > zero_obj) {
    out.X = zero;
    out.objective = zero_obj;
    out.guard_applied = true;
  }
  return out;
}

GeneralRegression solve_general_regression(const MatrixRef& A, const MatrixRef& B, const MatrixMeasure& f,
                                           const SmallSolver& small, double eps, const SizePolicy& policy,
                                           std::uint64_t seed, std::optional<double> rank_hat) {
  const double r = rank_hat ? *rank_hat : static_cast<double>(numerical_rank(singular_values(A)));
  const Index mS = recommend_size(policy, r, eps, SizePurpose::Affine);
  const SketchSpec S = clamp_to_input(SketchSpec::count_sketch(mS, derive_seed(seed, 1)), A.rows());
  const double rank_sb = static_cast<double>(std::min(S.output_dim(A.rows()), B.cols()));
  const Index mR = recommend_size(policy, rank_sb, eps, SizePurpose::Affine);
  const SketchSpec R = clamp_to_input(SketchSpec::count_sketch(mR, derive_seed(seed, 2), Side::Right), B.cols());
  const SketchSpec Sh = clamp_to_input(SketchSpec::count_sketch(mS, derive_seed(seed, 3)), A.rows());
  return solve_general_regression(A, B, f, small, RegressionSketches{S, R, Sh});
}

} // namespace sketchreg
