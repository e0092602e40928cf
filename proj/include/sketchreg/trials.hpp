#pragma once

#include "sketchreg/problems.hpp"
#include "sketchreg/size_policy.hpp"
#include "sketchreg/sketch.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sketchreg {

/// How lambda is chosen per generated problem.
struct LambdaRule {
  enum class Kind { Absolute, TargetSd, Sigma1SqFactor, MedianSigma };
  Kind kind = Kind::Absolute;
  double value = 1.0;

  double resolve(const Vector& sigma) const;
};

std::string to_string(LambdaRule::Kind k);
LambdaRule::Kind lambda_kind_from_string(const std::string& name);

struct TrialConfig {
  std::string task = "ridge";  // ridge, ridge-wide, mr-ridge, lowrank, cca, genreg, statdim, check-embedding
  GeneratorSpec gen;
  LambdaRule lambda;
  std::optional<LambdaRule> lambda2;  // CCA second view; defaults to `lambda`
  double eps = 0.5;
  Index k = 5;
  std::optional<SketchSpec> sketch;   // overrides the policy sketch
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::string sd_source = "exact";    // "exact" or "estimate"
  std::string measure = "frobenius_sq";
  std::string genreg_mode = "regression";  // or "lowrank"
  std::string variant = "frob+trace";
  double schatten_p = 2.0;
  int repeats = 1;
  int embed_trials = 20;
  double pass_threshold = 0.8;
  SizePolicy policy = SizePolicy::calibrated();
  std::optional<std::string> matrix_path;
  bool omit_timings = false;

  void validate() const;
};

struct Timings {
  double sketch_apply = 0.0;
  double small_solve = 0.0;
  double total = 0.0;
};

struct TrialRecord {
  std::string task;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  double objective_sketched = 0.0;
  double objective_exact = 0.0;
  double ratio = 0.0;
  bool pass = false;
  Timings timings;
  std::vector<Index> sketch_dims;
  std::map<std::string, double> extra;
};

struct TrialSummary {
  std::string task;
  std::uint64_t config_hash = 0;
  int trials = 0;
  int passed = 0;
  double pass_fraction = 0.0;
  double median_ratio = 0.0;
  double threshold = 0.8;
  bool ok = false;  // pass_fraction >= threshold
};

struct TrialReport {
  std::vector<TrialRecord> records;  // sorted by seed
  TrialSummary summary;
};

/// Per-task defaults: the problem families used by the acceptance run.
TrialConfig default_config(const std::string& task);

/// FNV-1a of the canonical JSON form of the config (seeds included).
std::uint64_t config_hash(const TrialConfig& config);

/// True for tasks whose ratio is sketched / exact objective of a minimization.
bool is_minimization_task(const std::string& task);

/// Problem for one seed: the generator, or the Matrix Market file when set.
Problem load_problem(const TrialConfig& config, std::uint64_t seed);

TrialRecord run_trial(const TrialConfig& config, std::uint64_t seed);

/// Runs every seed and summarizes. Throws std::logic_error if a minimization
/// record beats its exact oracle by more than 1e-9 relative.
TrialReport run_trials(const TrialConfig& config);

/// "a..b" (inclusive) or a comma-separated list.
std::vector<std::uint64_t> parse_seed_range(const std::string& text);

struct CalibrationPoint {
  double value = 0.0;
  double pass_rate = 0.0;
  int trials = 0;
};

struct CalibrationResult {
  std::string constant;
  std::string family;
  double value = 0.0;
  double pass_rate = 0.0;
  bool monotone = true;
  int trials = 0;
  std::vector<CalibrationPoint> points;
};

struct CalibrationOptions {
  int problems = 4;           // seeded problems in the family
  int trials_per_problem = 10;
  double target_rate = 0.9;
  double lo = 1e-3;
  double hi = 10.0;
  int steps = 10;             // bisection steps on log K
  std::uint64_t seed = 1000;
};

/// Constants that calibrate() knows: k_subspace, k_affine, k_sparse, k_srht,
/// k_gauss, k_wide, k_lowrank, k_cca (in dependency order).
std::vector<std::string> calibratable_constants();

/// Empirical pass rate of the family for `constant` with that constant set to `value`.
CalibrationPoint calibration_pass_rate(const std::string& constant, double value, const SizePolicy& base,
                                       const CalibrationOptions& opts);

/// Smallest value on a log-scale bisection with pass rate >= target. A
/// non-monotone pass-rate sequence triggers one retry with twice the trials;
/// a second one throws std::runtime_error.
CalibrationResult calibrate_constant(const std::string& constant, const SizePolicy& base,
                                     const CalibrationOptions& opts);

double& policy_constant(SizePolicy& policy, const std::string& name);

} // namespace sketchreg
