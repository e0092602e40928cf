#include "sketchreg/json_io.hpp"
#include "sketchreg/lowrank.hpp"
#include "sketchreg/matrix_market.hpp"
#include "sketchreg/trials.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace sketchreg;

struct RunArgs {
  std::string config_path;
  std::string seeds;
  std::optional<double> eps;
  std::optional<double> lambda;
  std::string lambda_rule;
  std::optional<double> lambda2;
  std::optional<Index> k;
  std::string sketch;
  std::string out;
  std::string format = "jsonl";
  std::string matrix;
  std::string sd_source;
  std::optional<double> threshold;
  bool omit_timings = false;
  // genreg
  std::string measure, mode, variant;
  // lowrank
  std::string factors_prefix;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

TrialConfig build_config(const std::string& task, const RunArgs& a) {
  Json base = default_config(task);
  if (!a.config_path.empty()) base.merge_patch(Json::parse(slurp(a.config_path)));
  base["task"] = task;
  TrialConfig c = base.get<TrialConfig>();
  if (!a.seeds.empty()) c.seeds = parse_seed_range(a.seeds);
  if (a.eps) c.eps = *a.eps;
  if (a.k) c.k = *a.k;
  const auto kind = a.lambda_rule.empty() ? c.lambda.kind : lambda_kind_from_string(a.lambda_rule);
  if (a.lambda) c.lambda = LambdaRule{kind, *a.lambda};
  else if (!a.lambda_rule.empty()) c.lambda.kind = kind;
  if (a.lambda2) c.lambda2 = LambdaRule{kind, *a.lambda2};
  if (!a.sketch.empty())
    c.sketch = sketch_from_json_text(std::filesystem::exists(a.sketch) ? slurp(a.sketch) : a.sketch);
  if (!a.matrix.empty()) c.matrix_path = a.matrix;
  if (!a.sd_source.empty()) c.sd_source = a.sd_source;
  if (a.threshold) c.pass_threshold = *a.threshold;
  if (!a.measure.empty()) c.measure = a.measure;
  if (!a.mode.empty()) c.genreg_mode = a.mode;
  if (!a.variant.empty()) c.variant = a.variant;
  if (a.omit_timings) c.omit_timings = true;
  c.validate();
  return c;
}

void add_run_options(CLI::App* sub, RunArgs& a) {
  sub->add_option("--config", a.config_path, "TrialConfig JSON file")->check(CLI::ExistingFile);
  sub->add_option("--seeds", a.seeds, "seed range a..b or list a,b,c");
  sub->add_option("--eps", a.eps, "accuracy parameter in (0, 1]");
  sub->add_option("--lambda", a.lambda, "lambda value (interpreted by --lambda-rule)");
  sub->add_option("--lambda-rule", a.lambda_rule, "absolute | target_sd | sigma1_sq_factor | median_sigma");
  sub->add_option("--k", a.k, "target rank");
  sub->add_option("--sketch", a.sketch, "sketch override: JSON text or a JSON file");
  sub->add_option("--out", a.out, "report path (default stdout)");
  sub->add_option("--format", a.format, "jsonl | csv")->check(CLI::IsMember({"jsonl", "csv"}));
  sub->add_option("--matrix", a.matrix, "Matrix Market input replacing the generator")->check(CLI::ExistingFile);
  sub->add_option("--sd-source", a.sd_source, "exact | estimate");
  sub->add_option("--threshold", a.threshold, "required pass fraction (default 0.8)");
  sub->add_flag("--omit-timings", a.omit_timings, "leave timings out of the report");
}

int run_task(const std::string& task, const RunArgs& a) {
  const TrialConfig c = build_config(task, a);
  const TrialReport rep = run_trials(c);
  write_output(a.out, a.format == "csv" ? to_csv(rep, c.omit_timings) : to_jsonl(rep, c.omit_timings));
  if (task == "lowrank" && !a.factors_prefix.empty()) {
    const Problem p = load_problem(c, c.seeds.front());
    const LowRankFactors f = solve_sketched(p.A, c.k, c.lambda.resolve(p.sigma), c.eps, c.policy, c.seeds.front());
    write_matrix_market(f.Y, a.factors_prefix + "_Y.mtx");
    write_matrix_market(f.X, a.factors_prefix + "_X.mtx");
  }
  const auto& s = rep.summary;
  std::cerr << task << ": " << s.passed << "/" << s.trials << " passed, median ratio " << s.median_ratio
            << (s.ok ? "" : " (below threshold)") << "\n";
  return s.ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"sketchreg: sketching for regularized problems, with exact oracles"};
  app.require_subcommand(1);

  RunArgs args;
  const std::vector<std::string> tasks = {"ridge",   "ridge-wide", "mr-ridge", "lowrank",
                                          "cca",     "genreg",     "statdim",  "check-embedding"};
  std::map<std::string, CLI::App*> subs;
  for (const auto& t : tasks) {
    auto* sub = app.add_subcommand(t, "run seeded " + t + " trials against the exact oracle");
    add_run_options(sub, args);
    subs[t] = sub;
  }
  subs["genreg"]->add_option("--measure", args.measure, "regularizer by name (regression mode)");
  subs["genreg"]->add_option("--mode", args.mode, "regression | lowrank");
  subs["genreg"]->add_option("--variant", args.variant, "frob+trace | frob+frobYX (lowrank mode)");
  subs["lowrank"]->add_option("--factors-prefix", args.factors_prefix,
                              "write first-seed factors to <prefix>_Y.mtx and <prefix>_X.mtx");

  std::vector<std::string> constants;
  CalibrationOptions copts;
  std::string cal_out, cal_base;
  double headroom = 1.0;
  auto* cal = app.add_subcommand("calibrate", "fit policy constants on the built-in problem families");
  cal->add_option("--constant", constants, "constant(s) to fit (default: all, in dependency order)");
  cal->add_option("--problems", copts.problems, "seeded problems per family");
  cal->add_option("--trials", copts.trials_per_problem, "sketch draws per problem");
  cal->add_option("--seed", copts.seed, "first family seed");
  cal->add_option("--steps", copts.steps, "bisection steps");
  cal->add_option("--base", cal_base, "starting policy JSON (default: shipped policy)")->check(CLI::ExistingFile);
  cal->add_option("--headroom", headroom, "factor applied to the fitted values in the emitted policy")
      ->check(CLI::PositiveNumber);
  cal->add_option("--out", cal_out, "policy JSON path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& t : tasks)
      if (subs[t]->parsed()) return run_task(t, args);

    SizePolicy policy = cal_base.empty() ? SizePolicy::calibrated() : Json::parse(slurp(cal_base)).get<SizePolicy>();
    if (constants.empty()) constants = calibratable_constants();
    Json results = Json::array();
    for (const auto& name : constants) {
      const CalibrationResult r = calibrate_constant(name, policy, copts);
      policy_constant(policy, name) = r.value;
      std::cerr << name << " = " << r.value << " (pass rate " << r.pass_rate << " over " << r.trials << ")\n";
      results.push_back(r);
    }
    for (const auto& name : constants) policy_constant(policy, name) *= headroom;
    std::ostringstream prov;
    prov << "sketchreg calibrate (target 0.9, " << copts.problems << "x" << copts.trials_per_problem
         << " draws, seed " << copts.seed << ")";
    if (headroom != 1.0) prov << " x" << headroom << " headroom";
    policy.provenance = prov.str();
    Json out;
    out["policy"] = policy;
    out["calibration"] = results;
    write_output(cal_out, out.dump(2) + "\n");
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
