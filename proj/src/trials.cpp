#include "sketchreg/trials.hpp"

#include "sketchreg/cca.hpp"
#include "sketchreg/embedding.hpp"
#include "sketchreg/genreg.hpp"
#include "sketchreg/json_io.hpp"
#include "sketchreg/linalg.hpp"
#include "sketchreg/lowrank.hpp"
#include "sketchreg/matrix_market.hpp"
#include "sketchreg/ridge.hpp"
#include "sketchreg/statdim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace sketchreg {

std::string to_string(LambdaRule::Kind k) {
  switch (k) {
  case LambdaRule::Kind::Absolute: return "absolute";
  case LambdaRule::Kind::TargetSd: return "target_sd";
  case LambdaRule::Kind::Sigma1SqFactor: return "sigma1_sq_factor";
  case LambdaRule::Kind::MedianSigma: return "median_sigma";
  }
  return "unknown";
}

LambdaRule::Kind lambda_kind_from_string(const std::string& name) {
  for (auto k : {LambdaRule::Kind::Absolute, LambdaRule::Kind::TargetSd, LambdaRule::Kind::Sigma1SqFactor,
                 LambdaRule::Kind::MedianSigma})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown lambda rule '" + name + "'");
}

double LambdaRule::resolve(const Vector& sigma) const {
  switch (kind) {
  case Kind::Absolute: return value;
  case Kind::TargetSd: return lambda_for_sd(sigma, value);
  case Kind::Sigma1SqFactor: return sigma.size() ? value * sigma(0) * sigma(0) : 0.0;
  case Kind::MedianSigma: {
    if (sigma.size() == 0) return 0.0;
    std::vector<double> s(sigma.data(), sigma.data() + sigma.size());
    std::sort(s.begin(), s.end());
    const std::size_t h = s.size() / 2;
    const double med = s.size() % 2 ? s[h] : 0.5 * (s[h - 1] + s[h]);
    return value * med;
  }
  }
  return value;
}

namespace {

const std::vector<std::string> kTasks = {"ridge", "ridge-wide", "mr-ridge", "lowrank",
                                         "cca",   "genreg",     "statdim",  "check-embedding"};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double ratio_of(double sketched, double exact) {
  if (exact > 0.0) return sketched / exact;
  return sketched <= 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
}

std::uint64_t sketch_seed(std::uint64_t seed) { return derive_seed(seed, 0x5eed); }

SketchSpec override_for(const TrialConfig& c, std::uint64_t seed, std::uint64_t stream, Side side) {
  return with_side(reseed(*c.sketch, derive_seed(seed, stream)), side);
}

ProxKind prox_kind_for(const std::string& measure) {
  if (measure == "frobenius_sq") return ProxKind::FrobeniusSq;
  if (measure == "nuclear" || measure == "schatten1") return ProxKind::Nuclear;
  if (measure == "vnorm1") return ProxKind::VNorm1;
  if (measure == "vnorm2") return ProxKind::VNorm2;
  throw std::invalid_argument("genreg: no reference solver for measure '" + measure + "'");
}

void fill_ratio(TrialRecord& r, double sketched, double exact, double eps) {
  r.objective_sketched = sketched;
  r.objective_exact = exact;
  r.ratio = ratio_of(sketched, exact);
  r.pass = r.ratio <= 1.0 + eps;
}

TrialRecord ridge_trial(const TrialConfig& c, const Problem& prob, std::uint64_t seed) {
  TrialRecord r;
  const double lambda = c.lambda.resolve(prob.sigma);
  const RidgeProblem p{prob.A, prob.rhs, lambda};
  const RidgeSolution exact = solve_exact(p);
  RidgeSolution sol;
  if (c.task == "ridge-wide") {
    SketchSpec spec;
    if (c.sketch) {
      spec = override_for(c, seed, 1, Side::Left);
    } else {
      const WideSizing w = wide_ridge_sketch(c.policy, p.A, lambda, c.eps, sketch_seed(seed));
      spec = w.spec;
      r.extra["eps_prime"] = w.eps_prime;
      r.extra["sigma1_estimate"] = w.sigma1_estimate;
      r.extra["m_requested"] = static_cast<double>(w.m);
      r.extra["clamped"] = w.clamped ? 1.0 : 0.0;
    }
    sol = solve_sketched_cols(p, spec, {c.repeats});
  } else {
    SketchSpec spec;
    if (c.sketch) {
      spec = override_for(c, seed, 1, Side::Left);
    } else {
      double sd_hat = 0.0;
      if (c.sd_source == "exact") {
        sd_hat = sd_exact_of(p.A, lambda);
      } else {
        Rng rng(seed, 41);
        sd_hat = lambda > 0.0 ? sd_estimate(p.A, lambda, rng).estimate : static_cast<double>(p.A.cols());
      }
      r.extra["sd_hat"] = sd_hat;
      spec = tall_ridge_sketch(c.policy, sd_hat, c.eps, p.A.rows(), sketch_seed(seed));
    }
    sol = c.task == "mr-ridge" ? solve_sketched_mr(p, spec, std::nullopt, {c.repeats})
                               : solve_sketched_rows(p, spec, std::nullopt, {c.repeats});
  }
  r.extra["lambda"] = lambda;
  r.extra["guard_applied"] = sol.guard_applied ? 1.0 : 0.0;
  r.sketch_dims = {sol.sketch_rows};
  r.timings.sketch_apply = sol.sketch_seconds;
  r.timings.small_solve = sol.solve_seconds;
  fill_ratio(r, sol.objective, exact.objective, c.eps);
  return r;
}

TrialRecord lowrank_trial(const TrialConfig& c, const Problem& prob, std::uint64_t seed) {
  TrialRecord r;
  const double lambda = c.lambda.resolve(prob.sigma);
  const LowRankFactors exact = solve_exact_shrink(prob.A, c.k, lambda);
  LowRankFactors sol;
  if (c.sketch) {
    const LowRankSketches sk{override_for(c, seed, 11, Side::Left), override_for(c, seed, 12, Side::Right),
                             override_for(c, seed, 13, Side::Left), override_for(c, seed, 14, Side::Right)};
    sol = solve_sketched(prob.A, c.k, lambda, sk);
  } else {
    LowRankOptions opts;
    if (c.sd_source == "exact") opts.sd_hat = exact.sd;
    sol = solve_sketched(prob.A, c.k, lambda, c.eps, c.policy, sketch_seed(seed), opts);
  }
  if (sol.sketches.size() == 4) {
    const Index n = sol.Y.rows(), d = sol.X.cols();
    const bool transposed = c.sketch ? false : (d > n);
    const Index rows = transposed ? d : n, cols = transposed ? n : d;
    r.sketch_dims = {sol.sketches[0].output_dim(rows), sol.sketches[1].output_dim(cols),
                     sol.sketches[2].output_dim(rows), sol.sketches[3].output_dim(cols)};
  }
  r.extra["lambda"] = lambda;
  r.extra["sd_y_star"] = exact.sd;
  r.timings.sketch_apply = sol.sketch_seconds;
  r.timings.small_solve = sol.solve_seconds;
  fill_ratio(r, sol.objective, exact.objective, c.eps);
  return r;
}

TrialRecord cca_trial(const TrialConfig& c, const Problem& prob, std::uint64_t seed) {
  if (prob.B.cols() == 0) throw std::invalid_argument("cca: generator.cols_b must be >= 1");
  TrialRecord r;
  const double l1 = c.lambda.resolve(prob.sigma);
  const double l2 = c.lambda2.value_or(c.lambda).resolve(singular_values(prob.B));
  const CcaResult exact = solve_exact_cca(prob.A, prob.B, l1, l2);
  SketchSpec spec;
  if (c.sketch) {
    spec = override_for(c, seed, 1, Side::Left);
  } else if (c.sd_source == "exact") {
    const double sd = std::max(sd_exact_of(prob.A, l1), sd_exact_of(prob.B, l2));
    r.extra["sd_hat"] = sd;
    const Index m = recommend_size(c.policy, sd, c.eps, SizePurpose::Cca);
    spec = clamp_to_input(SketchSpec::count_sketch(m, derive_seed(sketch_seed(seed), 1)), prob.A.rows());
  } else {
    double sd = 0.0;
    spec = cca_sketch(c.policy, prob.A, prob.B, l1, l2, c.eps, sketch_seed(seed), &sd);
    r.extra["sd_hat"] = sd;
  }
  const CcaResult cand = solve_sketched_cca(prob.A, prob.B, l1, l2, spec);
  const CcaValidation v = validate_cca(prob.A, prob.B, l1, l2, cand, exact, c.eps);
  r.objective_sketched = cand.sigmas.sum();
  r.objective_exact = exact.sigmas.sum();
  const double dev = std::max({v.max_sigma_dev, v.max_constraint_dev, v.max_alignment_dev});
  r.ratio = 1.0 + dev;
  r.pass = v.pass;
  double trace_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t L = 0; L < v.trace_gap.size(); ++L)
    trace_excess = std::max(trace_excess, v.trace_gap[L] - c.eps * static_cast<double>(L + 1));
  r.extra["lambda1"] = l1;
  r.extra["lambda2"] = l2;
  r.extra["max_sigma_dev"] = v.max_sigma_dev;
  r.extra["max_constraint_dev"] = v.max_constraint_dev;
  r.extra["max_alignment_dev"] = v.max_alignment_dev;
  r.extra["max_trace_excess"] = trace_excess;
  r.sketch_dims = {spec.output_dim(prob.A.rows())};
  r.timings.sketch_apply = cand.sketch_seconds;
  r.timings.small_solve = cand.solve_seconds;
  return r;
}

TrialRecord genreg_trial(const TrialConfig& c, const Problem& prob, std::uint64_t seed) {
  TrialRecord r;
  const double lambda = c.lambda.resolve(prob.sigma);
  r.extra["lambda"] = lambda;
  if (c.genreg_mode == "lowrank") {
    const DiagVariant v = diag_variant_from_string(c.variant);
    if (v == DiagVariant::SchattenTrace)
      throw std::invalid_argument("genreg: the sketched low-rank pipeline supports only the Frobenius fit term");
    const PairMeasure f = variant_pair(v, lambda);
    const DiagSolver solver = make_diag_solver(lambda, v, c.schatten_p);
    const GeneralLowRank exact = solve_diag_reduction(prob.A, c.k, f, variant_fit(v), solver);
    const auto t0 = Clock::now();
    GeneralLowRank sol;
    if (c.sketch) {
      const LowRankSketches sk{override_for(c, seed, 11, Side::Left), override_for(c, seed, 12, Side::Right),
                               override_for(c, seed, 13, Side::Left), override_for(c, seed, 14, Side::Right)};
      sol = solve_general_lowrank(prob.A, c.k, f, solver, sk);
    } else {
      sol = solve_general_lowrank(prob.A, c.k, f, solver, c.eps, c.policy, sketch_seed(seed));
    }
    r.timings.small_solve = seconds_since(t0);
    for (const auto& s : sol.sketches)
      r.sketch_dims.push_back(s.output_dim(s.side == Side::Left ? prob.A.rows() : prob.A.cols()));
    fill_ratio(r, sol.objective, exact.objective, c.eps);
    return r;
  }
  if (c.genreg_mode != "regression") throw std::invalid_argument("genreg_mode must be 'regression' or 'lowrank'");
  const MatrixMeasure f = measure_by_name(c.measure, lambda);
  const ProxKind kind = prox_kind_for(c.measure);
  const SmallSolver small = kind == ProxKind::FrobeniusSq ? ridge_small_solver(lambda) : proximal_small_solver(kind, lambda);
  const Matrix x_exact = small(prob.A, prob.rhs);
  const double exact = (prob.A * x_exact - prob.rhs).squaredNorm() + f(x_exact);
  const auto t0 = Clock::now();
  GeneralRegression sol;
  if (c.sketch) {
    const RegressionSketches sk{override_for(c, seed, 1, Side::Left), override_for(c, seed, 2, Side::Right),
                                override_for(c, seed, 3, Side::Left)};
    sol = solve_general_regression(prob.A, prob.rhs, f, small, sk);
  } else {
    sol = solve_general_regression(prob.A, prob.rhs, f, small, c.eps, c.policy, sketch_seed(seed));
  }
  r.timings.small_solve = seconds_since(t0);
  r.sketch_dims = {sol.reduced_rows, sol.reduced_cols};
  r.extra["guard_applied"] = sol.guard_applied ? 1.0 : 0.0;
  fill_ratio(r, sol.objective, exact, c.eps);
  return r;
}

TrialRecord statdim_trial(const TrialConfig& c, const Problem& prob, std::uint64_t seed) {
  TrialRecord r;
  const double lambda = c.lambda.resolve(prob.sigma);
  ResidualOptions opts;
  opts.backend = c.sd_source == "exact" ? ResidualBackend::ExactSvd : ResidualBackend::Krylov;
  Rng rng(seed, 51);
  const auto t0 = Clock::now();
  const StatDimEstimate est = sd_estimate(prob.A, lambda, rng, opts);
  r.timings.small_solve = seconds_since(t0);
  const double sd = sd_exact_of(prob.A, lambda);
  r.objective_sketched = est.estimate;
  r.objective_exact = sd;
  r.ratio = ratio_of(est.estimate, sd);
  r.pass = sd >= est.estimate / 16.0 && sd <= 1.5 * est.estimate;
  r.extra["lambda"] = lambda;
  r.extra["z_prime"] = static_cast<double>(est.z_prime);
  r.extra["gamma_hat"] = est.gamma_hat;
  r.extra["lower"] = est.lower;
  r.extra["upper"] = est.upper;
  r.extra["binding"] = est.binding ? 1.0 : 0.0;
  return r;
}

TrialRecord embedding_trial(const TrialConfig& c, const Problem& prob, std::uint64_t seed) {
  TrialRecord r;
  const double lambda = c.lambda.resolve(prob.sigma);
  SketchSpec spec;
  if (c.sketch) {
    spec = override_for(c, seed, 1, Side::Left);
  } else {
    const double sd = sd_exact_of(prob.A, lambda);
    spec = clamp_to_input(
        SketchSpec::count_sketch(recommend_size(c.policy, sd, c.eps, SizePurpose::RidgeRows), sketch_seed(seed)),
        prob.A.rows());
  }
  Rng rng(seed, 61);
  const auto t0 = Clock::now();
  const auto [gram, prod] = check_ridge_conditions(spec, prob.A, prob.rhs, lambda, c.eps, c.embed_trials, rng);
  r.timings.sketch_apply = seconds_since(t0);
  const double rel_gram = gram.threshold > 0.0 ? gram.deviation / gram.threshold : gram.deviation;
  const double rel_prod = prod.threshold > 0.0 ? prod.deviation / prod.threshold : prod.deviation;
  r.objective_sketched = std::max(rel_gram, rel_prod);
  r.objective_exact = 1.0;
  r.ratio = r.objective_sketched;
  r.pass = gram.pass && prod.pass;
  r.sketch_dims = {spec.output_dim(prob.A.rows())};
  r.extra["lambda"] = lambda;
  r.extra["prodU1_deviation"] = gram.deviation;
  r.extra["prodU1_pass_fraction"] = gram.pass_fraction();
  r.extra["prodVec_deviation"] = prod.deviation;
  r.extra["prodVec_threshold"] = prod.threshold;
  r.extra["prodVec_pass_fraction"] = prod.pass_fraction();
  return r;
}

} // namespace

void TrialConfig::validate() const {
  if (std::find(kTasks.begin(), kTasks.end(), task) == kTasks.end())
    throw std::invalid_argument("unknown task '" + task + "'");
  if (!matrix_path) gen.validate();
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in (0, 1]");
  if (seeds.empty()) throw std::invalid_argument("seeds must be nonempty");
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (repeats < 1 || embed_trials < 1) throw std::invalid_argument("repeats and embed_trials must be >= 1");
  if (sd_source != "exact" && sd_source != "estimate")
    throw std::invalid_argument("sd_source must be 'exact' or 'estimate'");
}

TrialConfig default_config(const std::string& task) {
  using K = LambdaRule::Kind;
  TrialConfig c;
  c.task = task;
  c.gen = GeneratorSpec{4000, 30, SpectrumShape::Geometric, 0.8};
  c.lambda = {K::TargetSd, 5.0};
  if (task == "ridge-wide") {
    c.gen = GeneratorSpec{20, 2000, SpectrumShape::Geometric, 0.8};
    c.lambda = {K::Sigma1SqFactor, 0.25};
  } else if (task == "mr-ridge") {
    c.gen = GeneratorSpec{2000, 20, SpectrumShape::Geometric, 0.8};
    c.gen.rhs_cols = 15;
  } else if (task == "lowrank") {
    c.gen = GeneratorSpec{500, 300, SpectrumShape::Power, 1.0};
    c.gen.noise = 0.05;
    c.lambda = {K::MedianSigma, 1.0};
    c.k = 10;
  } else if (task == "cca") {
    c.gen = GeneratorSpec{3000, 10, SpectrumShape::Geometric, 0.8};
    c.gen.cols_b = 8;
    c.lambda = {K::TargetSd, 4.0};
    c.eps = 0.25;
  } else if (task == "genreg") {
    c.gen = GeneratorSpec{2000, 10, SpectrumShape::Geometric, 0.7};
    c.gen.rhs_cols = 3;
    c.lambda = {K::TargetSd, 4.0};
  } else if (task == "statdim") {
    c.gen = GeneratorSpec{300, 200, SpectrumShape::Power, 1.0};
    c.lambda = {K::Absolute, 1e-2};
    c.sd_source = "estimate";
  }
  return c;
}

std::uint64_t config_hash(const TrialConfig& config) {
  const std::string text = Json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool is_minimization_task(const std::string& task) {
  return task == "ridge" || task == "ridge-wide" || task == "mr-ridge" || task == "lowrank" || task == "genreg";
}

Problem load_problem(const TrialConfig& config, std::uint64_t seed) {
  Rng rng(seed, 0);
  if (!config.matrix_path) return generate_problem(config.gen, rng);
  Problem p;
  const MarketMatrix mm = read_matrix_market(*config.matrix_path);
  if (const auto* s = std::get_if<SparseMatrix>(&mm)) p.sparse = *s;
  p.A = to_dense(mm);
  p.sigma = singular_values(p.A);
  const Matrix x0 = gaussian_matrix(p.A.cols(), config.gen.rhs_cols, rng);
  p.rhs = p.A * x0;
  const Matrix E = gaussian_matrix(p.A.rows(), config.gen.rhs_cols, rng);
  const double scale = p.rhs.norm() > 0.0 ? p.rhs.norm() : 1.0;
  p.rhs += (config.gen.rhs_noise * scale / std::max(E.norm(), 1e-300)) * E;
  if (config.gen.cols_b > 0) {
    const Matrix W = gaussian_matrix(p.A.cols(), config.gen.cols_b, rng) / std::sqrt(static_cast<double>(p.A.cols()));
    const double s1 = p.sigma.size() ? p.sigma(0) : 1.0;
    p.B = config.gen.cca_coupling * (p.A * W) +
          s1 * gaussian_matrix(p.A.rows(), config.gen.cols_b, rng) / std::sqrt(static_cast<double>(p.A.rows()));
  }
  return p;
}

TrialRecord run_trial(const TrialConfig& c, std::uint64_t seed) {
  const auto t0 = Clock::now();
  const Problem prob = load_problem(c, seed);
  TrialRecord r;
  if (c.task == "ridge" || c.task == "ridge-wide" || c.task == "mr-ridge") r = ridge_trial(c, prob, seed);
  else if (c.task == "lowrank") r = lowrank_trial(c, prob, seed);
  else if (c.task == "cca") r = cca_trial(c, prob, seed);
  else if (c.task == "genreg") r = genreg_trial(c, prob, seed);
  else if (c.task == "statdim") r = statdim_trial(c, prob, seed);
  else if (c.task == "check-embedding") r = embedding_trial(c, prob, seed);
  else throw std::invalid_argument("unknown task '" + c.task + "'");
  r.task = c.task;
  r.seed = seed;
  r.config_hash = config_hash(c);
  r.timings.total = seconds_since(t0);
  return r;
}

TrialReport run_trials(const TrialConfig& config) {
  config.validate();
  TrialReport rep;
  std::vector<std::uint64_t> seeds = config.seeds;
  std::sort(seeds.begin(), seeds.end());
  for (auto s : seeds) {
    TrialRecord r = run_trial(config, s);
    if (is_minimization_task(config.task) && r.ratio < 1.0 - 1e-9)
      throw std::logic_error("ratio floor violated: seed " + std::to_string(s) + " has sketched/exact " +
                             std::to_string(r.ratio));
    rep.records.push_back(std::move(r));
  }
  auto& sm = rep.summary;
  sm.task = config.task;
  sm.config_hash = config_hash(config);
  sm.trials = static_cast<int>(rep.records.size());
  std::vector<double> ratios;
  for (const auto& r : rep.records) {
    sm.passed += r.pass ? 1 : 0;
    ratios.push_back(r.ratio);
  }
  std::sort(ratios.begin(), ratios.end());
  const std::size_t h = ratios.size() / 2;
  sm.median_ratio = ratios.size() % 2 ? ratios[h] : 0.5 * (ratios[h - 1] + ratios[h]);
  sm.pass_fraction = static_cast<double>(sm.passed) / sm.trials;
  sm.threshold = config.pass_threshold;
  sm.ok = sm.pass_fraction >= config.pass_threshold;
  return rep;
}

std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
  std::vector<std::uint64_t> out;
  const auto dots = text.find("..");
  try {
    if (dots != std::string::npos) {
      const std::uint64_t a = std::stoull(text.substr(0, dots));
      const std::uint64_t b = std::stoull(text.substr(dots + 2));
      if (b < a) throw std::invalid_argument("empty seed range");
      for (std::uint64_t s = a; s <= b; ++s) out.push_back(s);
    } else {
      std::size_t pos = 0;
      while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!tok.empty()) out.push_back(std::stoull(tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
    }
  } catch (const std::logic_error&) {
    throw std::invalid_argument("bad seed list '" + text + "' (expected a..b or a,b,c)");
  }
  if (out.empty()) throw std::invalid_argument("seed list '" + text + "' is empty");
  return out;
}

// ---------------------------------------------------------------------------
// Calibration

std::vector<std::string> calibratable_constants() {
  return {"k_subspace", "k_affine", "k_sparse", "k_srht", "k_gauss", "k_wide", "k_lowrank", "k_cca"};
}

double& policy_constant(SizePolicy& p, const std::string& name) {
  if (name == "k_sparse") return p.k_sparse;
  if (name == "k_srht") return p.k_srht;
  if (name == "k_gauss") return p.k_gauss;
  if (name == "k_subspace") return p.k_subspace;
  if (name == "k_affine") return p.k_affine;
  if (name == "k_cca") return p.k_cca;
  if (name == "k_lowrank") return p.k_lowrank;
  if (name == "k_wide") return p.k_wide;
  throw std::invalid_argument("unknown policy constant '" + name + "'");
}

namespace {

struct FamilyMember {
  std::uint64_t seed = 0;
  Problem prob;
  double lambda = 0.0;
  double lambda2 = 0.0;
  double sd = 0.0;
  double oracle = 0.0;  // exact objective where the family compares objectives
  CcaResult cca;
};

/// A fixed seeded problem family plus a per-trial pass predicate.
class Family {
public:
  Family(const std::string& constant, const CalibrationOptions& opts) : constant_(constant) {
    GeneratorSpec g;
    if (constant == "k_subspace") {
      g = GeneratorSpec{2000, 5, SpectrumShape::Geometric, 0.7};
      name_ = "2000x5 geometric(0.7), CountSketch K r^2/eps^2, subspace check at eps=0.5";
    } else if (constant == "k_affine") {
      g = GeneratorSpec{2000, 3, SpectrumShape::Geometric, 0.7};
      g.rhs_cols = 2;
      g.rhs_noise = 0.5;
      name_ = "2000x3 geometric(0.7), B 2000x2, CountSketch K r^2/eps^2, affine falsifier at eps=0.5";
    } else if (constant == "k_sparse" || constant == "k_srht" || constant == "k_gauss") {
      g = GeneratorSpec{4000, 30, SpectrumShape::Geometric, 0.8};
      name_ = "4000x30 geometric(0.8), lambda for sd=5, ridge conditions (both) at eps=0.5";
    } else if (constant == "k_wide") {
      g = GeneratorSpec{20, 2000, SpectrumShape::Geometric, 0.8};
      name_ = "20x2000 geometric(0.8), lambda = sigma1^2/4, sketched/exact <= 1.5";
    } else if (constant == "k_lowrank") {
      g = GeneratorSpec{500, 300, SpectrumShape::Power, 1.0};
      g.noise = 0.05;
      name_ = "500x300 power(1) + noise 0.05, k=10, lambda = median sigma, sketched/exact <= 1.5";
    } else if (constant == "k_cca") {
      g = GeneratorSpec{3000, 10, SpectrumShape::Geometric, 0.8};
      g.cols_b = 8;
      name_ = "3000x10 / 3000x8, lambdas for sd=4, validator at eta=0.25";
    } else {
      throw std::invalid_argument("unknown policy constant '" + constant + "'");
    }
    for (int i = 0; i < opts.problems; ++i) {
      FamilyMember m;
      m.seed = opts.seed + static_cast<std::uint64_t>(i);
      Rng rng(m.seed, 0);
      m.prob = generate_problem(g, rng);
      if (constant == "k_sparse" || constant == "k_srht" || constant == "k_gauss") {
        m.lambda = lambda_for_sd(m.prob.sigma, 5.0);
        m.sd = 5.0;
      } else if (constant == "k_wide") {
        m.lambda = 0.25 * m.prob.sigma(0) * m.prob.sigma(0);
        m.oracle = solve_exact(RidgeProblem{m.prob.A, m.prob.rhs, m.lambda}).objective;
      } else if (constant == "k_lowrank") {
        m.lambda = LambdaRule{LambdaRule::Kind::MedianSigma, 1.0}.resolve(singular_values(m.prob.A));
        const LowRankFactors ex = solve_exact_shrink(m.prob.A, 10, m.lambda);
        m.oracle = ex.objective;
        m.sd = ex.sd;
      } else if (constant == "k_cca") {
        m.lambda = lambda_for_sd(singular_values(m.prob.A), 4.0);
        m.lambda2 = lambda_for_sd(singular_values(m.prob.B), 4.0);
        m.sd = std::max(sd_exact_of(m.prob.A, m.lambda), sd_exact_of(m.prob.B, m.lambda2));
        m.cca = solve_exact_cca(m.prob.A, m.prob.B, m.lambda, m.lambda2);
      }
      members_.push_back(std::move(m));
    }
  }

  const std::string& name() const { return name_; }

  CalibrationPoint pass_rate(double value, const SizePolicy& base, int trials_per_problem) const {
    SizePolicy policy = base;
    policy_constant(policy, constant_) = value;
    int passes = 0, total = 0;
    for (const auto& m : members_) {
      for (int t = 0; t < trials_per_problem; ++t) {
        const std::uint64_t s = derive_seed(m.seed, 1000 + static_cast<std::uint64_t>(t));
        passes += trial_passes(m, policy, s) ? 1 : 0;
        ++total;
      }
    }
    return {value, static_cast<double>(passes) / total, total};
  }

private:
  bool trial_passes(const FamilyMember& m, const SizePolicy& policy, std::uint64_t s) const {
    const double eps = 0.5;
    const Matrix& A = m.prob.A;
    Rng rng(s, 3);
    if (constant_ == "k_subspace") {
      const Index r = numerical_rank(m.prob.sigma);
      const SketchSpec spec = clamp_to_input(
          SketchSpec::count_sketch(recommend_size(policy, static_cast<double>(r), eps, SizePurpose::Subspace), s),
          A.rows());
      return check_subspace_embedding(spec, A, eps, 1, rng).pass;
    }
    if (constant_ == "k_affine") {
      const Index r = numerical_rank(m.prob.sigma);
      const SketchSpec spec = clamp_to_input(
          SketchSpec::count_sketch(recommend_size(policy, static_cast<double>(r), eps, SizePurpose::Affine), s),
          A.rows());
      return check_affine_embedding(spec, A, m.prob.rhs, eps, 1, rng).pass;
    }
    if (constant_ == "k_sparse" || constant_ == "k_srht" || constant_ == "k_gauss") {
      SketchSpec spec;
      if (constant_ == "k_sparse")
        spec = SketchSpec::count_sketch(recommend_size(policy, m.sd, eps, SizePurpose::RidgeRows), s);
      else if (constant_ == "k_srht")
        spec = SketchSpec::srht(recommend_size(policy, m.sd, eps, SizePurpose::RidgeRowsSrht), s);
      else
        spec = SketchSpec::gaussian(recommend_size(policy, m.sd, eps, SizePurpose::RidgeRowsGauss), s);
      spec = clamp_to_input(spec, A.rows());
      const auto [gram, prod] = check_ridge_conditions(spec, A, m.prob.rhs, m.lambda, eps, 1, rng);
      return gram.pass && prod.pass;
    }
    if (constant_ == "k_wide") {
      const RidgeProblem p{A, m.prob.rhs, m.lambda};
      const WideSizing w = wide_ridge_sketch(policy, A, m.lambda, eps, s);
      return solve_sketched_cols(p, w.spec).objective <= (1.0 + eps) * m.oracle;
    }
    if (constant_ == "k_lowrank") {
      LowRankOptions opts;
      opts.sd_hat = m.sd;
      return solve_sketched(A, 10, m.lambda, eps, policy, s, opts).objective <= (1.0 + eps) * m.oracle;
    }
    // k_cca
    const double eta = 0.25;
    const Index mrows = recommend_size(policy, m.sd, eta, SizePurpose::Cca);
    const SketchSpec spec = clamp_to_input(SketchSpec::count_sketch(mrows, s), A.rows());
    const CcaResult cand = solve_sketched_cca(A, m.prob.B, m.lambda, m.lambda2, spec);
    return validate_cca(A, m.prob.B, m.lambda, m.lambda2, cand, m.cca, eta).pass;
  }

  std::string constant_;
  std::string name_;
  std::vector<FamilyMember> members_;
};

CalibrationResult bisect(const Family& fam, const std::string& constant, const SizePolicy& base,
                         const CalibrationOptions& opts, int trials_per_problem) {
  CalibrationResult res;
  res.constant = constant;
  res.family = fam.name();
  auto eval = [&](double v) {
    CalibrationPoint p = fam.pass_rate(v, base, trials_per_problem);
    res.points.push_back(p);
    return p;
  };
  double lo = opts.lo, hi = opts.hi;
  CalibrationPoint top = eval(hi);
  for (int grow = 0; top.pass_rate < opts.target_rate; ++grow) {
    if (grow == 6) throw std::runtime_error("calibrate " + constant + ": no passing value up to " + std::to_string(hi));
    lo = hi;
    hi *= 4.0;
    top = eval(hi);
  }
  CalibrationPoint best = top;
  if (eval(lo).pass_rate >= opts.target_rate) {
    best = res.points.back();
    hi = lo;
  } else {
    for (int i = 0; i < opts.steps; ++i) {
      const double mid = std::sqrt(lo * hi);
      const CalibrationPoint p = eval(mid);
      if (p.pass_rate >= opts.target_rate) {
        hi = mid;
        best = p;
      } else {
        lo = mid;
      }
    }
  }
  // Larger constants must keep passing.
  for (double f : {1.5, 2.0}) {
    if (eval(hi * f).pass_rate < opts.target_rate) res.monotone = false;
  }
  res.value = hi;
  res.pass_rate = best.pass_rate;
  res.trials = best.trials;
  return res;
}

} // namespace

CalibrationPoint calibration_pass_rate(const std::string& constant, double value, const SizePolicy& base,
                                       const CalibrationOptions& opts) {
  const Family fam(constant, opts);
  return fam.pass_rate(value, base, opts.trials_per_problem);
}

CalibrationResult calibrate_constant(const std::string& constant, const SizePolicy& base,
                                     const CalibrationOptions& opts) {
  const Family fam(constant, opts);
  CalibrationResult res = bisect(fam, constant, base, opts, opts.trials_per_problem);
  if (res.monotone) return res;
  CalibrationResult retry = bisect(fam, constant, base, opts, 2 * opts.trials_per_problem);
  if (!retry.monotone)
    throw std::runtime_error("calibrate " + constant + ": pass rate is not monotone in the constant");
  return retry;
}

} // namespace sketchreg
