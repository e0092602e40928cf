// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include "sketchreg/cca.hpp"
#include "sketchreg/embedding.hpp"
#include "sketchreg/genreg.hpp"
#include "sketchreg/linalg.hpp"
#include "sketchreg/lowrank.hpp"
#include "sketchreg/measures.hpp"
#include "sketchreg/problems.hpp"
#include "sketchreg/ridge.hpp"
#include "sketchreg/statdim.hpp"
#include "sketchreg/trials.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

using namespace sketchreg;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " FAILED(" << what << ")";
    }
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Problem make(const GeneratorSpec& g, std::uint64_t seed) {
  Rng rng(seed);
  return generate_problem(g, rng);
}

double alternating_min(const Matrix& A, Index k, double lambda, Rng& rng) {
  Matrix Y = gaussian_matrix(A.rows(), k, rng), X;
  const Matrix Ik = Matrix::Identity(k, k);
  double prev = std::numeric_limits<double>::infinity(), obj = prev;
  for (int it = 0; it < 200000; ++it) {
    X = (Y.transpose() * Y + lambda * Ik).ldlt().solve(Y.transpose() * A);
    Y = (X * X.transpose() + lambda * Ik).ldlt().solve(X * A.transpose()).transpose();
    obj = (Y * X - A).squaredNorm() + lambda * (Y.squaredNorm() + X.squaredNorm());
    if (prev - obj <= 1e-15 * obj) break;
    prev = obj;
  }
  return obj;
}

// 1. ridge, tall regime
void ridge_tall(Outcome& o) {
  const auto t0 = Clock::now();
  const GeneratorSpec g{4000, 30, SpectrumShape::Geometric, 0.8};
  int pass = 0;
  bool composed = true, in_band = true;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Problem p = make(g, seed);
    const double lambda = lambda_for_sd(p.sigma, 5.0);
    const double sd = sd_exact(p.sigma, lambda);
    in_band = in_band && sd >= 3 && sd <= 8;
    const RidgeProblem rp{p.A, p.rhs, lambda};
    const double opt = solve_exact(rp).objective;
    const SketchSpec s = tall_ridge_sketch(SizePolicy::calibrated(), sd, 0.5, 4000, seed);
    composed = composed && s.kind == SketchKind::Composed;
    pass += solve_sketched_rows(rp, s).objective <= 1.5 * opt ? 1 : 0;
  }
  const double secs = seconds_since(t0);
  o.detail << pass << "/10 seeds within 1.5 x optimum, " << secs << " s";
  o.require(in_band, "sd in [3,8]");
  o.require(composed, "CountSketch then SRHT");
  o.require(pass >= 8, ">= 8/10");
  o.require(secs < 10.0, "< 10 s");
}

// 2. ridge, wide regime
void ridge_wide(Outcome& o) {
  const GeneratorSpec g{20, 2000, SpectrumShape::Geometric, 0.8};
  int pass = 0;
  double worst_identity = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Problem p = make(g, seed);
    const double lambda = 0.25 * p.sigma(0) * p.sigma(0);
    const RidgeProblem rp{p.A, p.rhs, lambda};
    const double opt = solve_exact(rp).objective;
    const WideSizing w = wide_ridge_sketch(SizePolicy::calibrated(), p.A, lambda, 0.5, seed);
    pass += solve_sketched_cols(rp, w.spec).objective <= 1.5 * opt ? 1 : 0;
    const double id = solve_sketched_cols(rp, SketchSpec::identity()).objective;
    worst_identity = std::max(worst_identity, std::abs(id - opt) / opt);
  }
  o.detail << pass << "/10 seeds within 1.5 x optimum; identity rel. error " << worst_identity;
  o.require(pass >= 8, ">= 8/10");
  o.require(worst_identity <= 1e-6, "identity <= 1e-6");
}

// 3. ridge low-rank approximation
void ridge_lowrank(Outcome& o) {
  GeneratorSpec g{500, 300, SpectrumShape::Power, 1.0};
  g.noise = 0.05;
  int pass = 0;
  double worst_identity = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Problem p = make(g, seed);
    const double lambda = LambdaRule{LambdaRule::Kind::MedianSigma, 1.0}.resolve(singular_values(p.A));
    const LowRankFactors ex = solve_exact_shrink(p.A, 10, lambda);
    const LowRankFactors sk = solve_sketched(p.A, 10, lambda, 0.5, SizePolicy::calibrated(), seed);
    pass += sk.objective <= 1.5 * ex.objective ? 1 : 0;
    const double id = solve_sketched(p.A, 10, lambda, LowRankSketches::identity()).objective;
    worst_identity = std::max(worst_identity, std::abs(id - ex.objective) / ex.objective);
  }
  double worst_am = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    const Matrix A = gaussian_matrix(8, 6, rng);
    const double lambda = 0.5 * singular_values(A)(2);
    const double closed = solve_exact_shrink(A, 3, lambda).objective;
    worst_am = std::max(worst_am, std::abs(alternating_min(A, 3, lambda, rng) - closed) / closed);
  }
  o.detail << pass << "/10 seeds within 1.5 x optimum; identity rel. error " << worst_identity
           << "; closed form vs alternating minimization " << worst_am;
  o.require(pass >= 8, ">= 8/10");
  o.require(worst_identity <= 1e-6, "identity <= 1e-6");
  o.require(worst_am <= 1e-6, "alternating minimization <= 1e-6");
}

// 4. regularized CCA
void cca(Outcome& o) {
  GeneratorSpec g{3000, 10, SpectrumShape::Geometric, 0.8};
  g.cols_b = 8;
  const double eta = 0.25;
  int pass = 0;
  double worst_constraint = 0, worst_excess = -1;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Problem p = make(g, seed);
    const double l1 = lambda_for_sd(singular_values(p.A), 4.0), l2 = lambda_for_sd(singular_values(p.B), 4.0);
    const CcaResult ex = solve_exact_cca(p.A, p.B, l1, l2);
    worst_constraint = std::max({worst_constraint, cca_constraint_residual(p.A, l1, ex.U),
                                 cca_constraint_residual(p.B, l2, ex.V)});
    const SketchSpec s = cca_sketch(SizePolicy::calibrated(), p.A, p.B, l1, l2, eta, seed);
    const CcaValidation v = validate_cca(p.A, p.B, l1, l2, solve_sketched_cca(p.A, p.B, l1, l2, s), ex, eta);
    if (!v.pass) continue;
    ++pass;
    for (std::size_t L = 0; L < v.trace_gap.size(); ++L)
      worst_excess = std::max(worst_excess, v.trace_gap[L] - eta * static_cast<double>(L + 1));
  }
  o.detail << pass << "/10 seeds validated at eta 0.25; exact constraint residual " << worst_constraint
           << "; max trace gap minus eta L " << worst_excess;
  o.require(pass >= 8, ">= 8/10");
  o.require(worst_constraint <= 1e-8, "constraints <= 1e-8");
  o.require(worst_excess <= 1e-8, "trace gap <= eta L + 1e-8");
}

// 5. statistical dimension estimator
void statdim(Outcome& o) {
  const GeneratorSpec g{300, 200, SpectrumShape::Power, 1.0};
  const double lambdas[] = {1e-4, 1e-3, 1e-2, 1e-1};
  int chain_ok = 0, chain_total = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Problem p = make(g, seed);
    for (double l : lambdas) {
      Rng rng(seed, 1);
      const StatDimEstimate e = sd_estimate(p.A, l, rng, {ResidualBackend::ExactSvd});
      const double sd = sd_exact(p.sigma, l);
      const double z = static_cast<double>(e.z_prime), r = e.gamma_hat / l;
      ++chain_total;
      chain_ok += (0.375 * std::min(z, r) <= sd && sd <= 1.5 * (z + r)) ? 1 : 0;
    }
  }
  int band_ok = 0, band_total = 0;
  for (std::uint64_t seed = 101; seed <= 125; ++seed) {
    const Problem p = make(g, seed);
    for (double l : lambdas) {
      Rng rng(seed, 2);
      const double est = sd_estimate(p.A, l, rng).estimate;
      const double sd = sd_exact(p.sigma, l);
      ++band_total;
      band_ok += (sd >= est / 16.0 && sd <= 1.5 * est) ? 1 : 0;
    }
  }
  o.detail << "certificate chain " << chain_ok << "/" << chain_total << " (exact residuals); randomized band "
           << band_ok << "/" << band_total;
  o.require(chain_ok == chain_total, "chain on 100%");
  o.require(band_ok >= 95 * band_total / 100, "band >= 95%");
}

// 6. general regularization
void general(Outcome& o) {
  Rng rng(6);
  const Matrix A = gaussian_matrix(80, 10, rng), B = gaussian_matrix(80, 4, rng);
  const double lambda = 0.5;
  const GeneralRegression reg =
      solve_general_regression(A, B, frobenius_sq(lambda), ridge_small_solver(lambda), RegressionSketches::identity());
  const double ridge = solve_exact({A, B, lambda}).objective;
  const double reg_err = std::abs(reg.objective - ridge) / ridge;

  const Matrix M = gaussian_matrix(40, 30, rng);
  const double lm = singular_values(M)(4);
  const GeneralLowRank lr = solve_general_lowrank(M, 6, variant_pair(DiagVariant::FrobTrace, lm),
                                                  make_diag_solver(lm, DiagVariant::FrobTrace),
                                                  LowRankSketches::identity());
  const double closed = solve_exact_shrink(M, 6, lm).objective;
  const double lr_err = std::abs(lr.objective - closed) / closed;

  int dom_ok = 0, dom_total = 0;
  for (DiagVariant v : {DiagVariant::FrobTrace, DiagVariant::FrobFrobYX, DiagVariant::SchattenTrace}) {
    for (int inst = 0; inst < 3; ++inst) {
      Vector s(4);
      for (Index i = 0; i < 4; ++i) s(i) = 0.2 + 3 * rng.uniform();
      std::sort(s.data(), s.data() + 4, std::greater<>());
      const Matrix D = s.asDiagonal();
      const double l = 0.5 * s(2);
      const FitTerm fit = variant_fit(v);
      const PairMeasure f = variant_pair(v, l);
      const double got = solve_diag_reduction(D, 4, f, fit, make_diag_solver(l, v)).objective;
      double best = std::numeric_limits<double>::infinity();
      for (int t = 0; t < 10000; ++t) {
        Matrix Y = Matrix::Zero(4, 4), X = Matrix::Zero(4, 4);
        for (Index i = 0; i < 4; ++i) {
          Y(i, i) = 2.5 * rng.uniform();
          X(i, i) = 2.5 * rng.uniform();
        }
        best = std::min(best, fit(Y * X - D) + f(Y, X));
      }
      ++dom_total;
      dom_ok += got <= best + 1e-9 ? 1 : 0;
    }
  }

  int perm_ok = 0;
  for (int inst = 0; inst < 50; ++inst) {
    const Index n = 2 + static_cast<Index>(rng.index(5));
    Vector e(n), d(n);
    for (Index i = 0; i < n; ++i) {
      e(i) = rng.normal();
      d(i) = rng.normal();
    }
    const Matrix ERD = e.asDiagonal() * random_orthonormal(n, n, rng) * d.asDiagonal();
    bool ok = true;
    for (double p : {2.0, 1.0}) {
      std::vector<int> perm(static_cast<std::size_t>(n));
      std::iota(perm.begin(), perm.end(), 0);
      double best = std::numeric_limits<double>::infinity();
      do {
        Vector pe(n);
        for (Index i = 0; i < n; ++i) pe(i) = e(perm[static_cast<std::size_t>(i)]) * d(i);
        best = std::min(best, schatten_norm(Matrix(pe.asDiagonal()), p));
      } while (std::next_permutation(perm.begin(), perm.end()));
      ok = ok && best <= schatten_norm(ERD, p) + 1e-9;
    }
    perm_ok += ok ? 1 : 0;
  }
  o.detail << "identity collapse: regression " << reg_err << ", low-rank " << lr_err << "; diagonal dominance "
           << dom_ok << "/" << dom_total << "; permutation search " << perm_ok << "/50";
  o.require(reg_err <= 1e-6 && lr_err <= 1e-6, "identity collapse <= 1e-6");
  o.require(dom_ok == dom_total, "dominance");
  o.require(perm_ok == 50, "permutation");
}

// 7. embedding conditions
void embedding(Outcome& o) {
  Rng rng(7);
  double worst_identity = 0;
  for (int t = 0; t < 5; ++t) {
    const Matrix A = gaussian_matrix(50 + 10 * t, 3 + t, rng), B = gaussian_matrix(50 + 10 * t, 2, rng);
    const auto id = SketchSpec::identity();
    const auto [g, p] = check_ridge_conditions(id, A, B.col(0), 0.1 * (t + 1), 0.5, 3, rng);
    worst_identity = std::max({worst_identity, check_subspace_embedding(id, A, 0.5, 3, rng).deviation,
                               check_affine_embedding(id, A, B, 0.5, 3, rng).deviation, g.deviation, p.deviation,
                               check_spectral_product(id, A, B, 0.1, 3, rng).deviation});
  }

  // the k_sparse calibration family, on a fresh problem seed
  const Problem p = make(GeneratorSpec{4000, 30, SpectrumShape::Geometric, 0.8}, 1);
  const double lambda = lambda_for_sd(p.sigma, 5.0);
  const Index m = recommend_size(SizePolicy::calibrated(), 5.0, 0.5, SizePurpose::RidgeRows);
  const auto [gram, prod] = check_ridge_conditions(SketchSpec::count_sketch(m, 1), p.A, p.rhs, lambda, 0.5, 20, rng);
  int joint = 0;
  for (std::size_t t = 0; t < gram.deviations.size(); ++t)
    joint += (gram.deviations[t] <= gram.threshold && prod.deviations[t] <= prod.threshold) ? 1 : 0;

  int under_pass = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng r(seed);
    const Matrix A = gaussian_matrix(500, 5, r);
    under_pass += check_subspace_embedding(SketchSpec::count_sketch(2, seed), A, 0.5, 10, r).passes;
    const Matrix A3 = gaussian_matrix(500, 3, r);
    under_pass += check_affine_embedding(SketchSpec::count_sketch(1, seed), A3, A3, 0.5, 10, r).passes;
    under_pass += check_ridge_conditions(SketchSpec::count_sketch(1, seed), p.A, p.rhs, lambda, 0.5, 10, r).first.passes;
  }
  o.detail << "identity deviation " << worst_identity << "; policy CountSketch (m = " << m << ") " << joint
           << "/20 trials; undersketched passes " << under_pass;
  o.require(worst_identity == 0.0, "identity exactly 0");
  o.require(joint >= 18, ">= 90% of 20");
  o.require(under_pass == 0, "undersketched fail");
}

// 8. CountSketch apply time against nnz
void performance(Outcome& o) {
  const Index n = 200000, d = 100, m = 500;
  auto median_time = [&](double density) {
    Rng rng(8);
    const SparseMatrix A = sparse_random(n, d, density, rng);
    std::vector<double> t;
    for (int r = 0; r < 5; ++r) {
      const auto t0 = Clock::now();
      const Matrix SA = apply(SketchSpec::count_sketch(m, 1), A);
      t.push_back(seconds_since(t0));
      if (SA.rows() != m) t.back() = 1e9;
    }
    std::sort(t.begin(), t.end());
    return std::make_pair(t[2], static_cast<double>(A.nonZeros()));
  };
  const auto [t1, nnz1] = median_time(0.02);
  const auto [t2, nnz2] = median_time(0.04);
  const double ratio = t2 / t1;
  o.detail << "nnz " << nnz1 << " -> " << nnz2 << ", median apply " << t1 << " s -> " << t2 << " s, ratio " << ratio;
  o.require(ratio <= 2.5, "ratio <= 2.5");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"ridge tall regime", ridge_tall},
      {"ridge wide regime", ridge_wide},
      {"ridge low-rank approximation", ridge_lowrank},
      {"regularized CCA", cca},
      {"statistical dimension estimator", statdim},
      {"general regularization", general},
      {"embedding conditions", embedding},
      {"CountSketch time vs nnz", performance},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " exception: " << e.what();
    }
    std::printf("criterion %zu [%s] %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.str().c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
