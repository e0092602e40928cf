#include "sketchreg/json_io.hpp"

#include <sstream>
#include <stdexcept>

namespace sketchreg {

void to_json(Json& j, const SketchSpec& s) {
  j = Json::object();
  j["variant"] = to_string(s.kind);
  if (s.kind != SketchKind::Identity && s.kind != SketchKind::Composed) j["m"] = s.m;
  if (s.kind == SketchKind::Osnap) j["s"] = s.osnap_sparsity();
  j["seed"] = s.seed;
  j["side"] = s.side == Side::Left ? "left" : "right";
  if (s.input_dim) j["n"] = s.input_dim;
  if (s.kind == SketchKind::Composed) j["stages"] = s.stages;
}

void from_json(const Json& j, SketchSpec& s) {
  s = SketchSpec{};
  s.kind = sketch_kind_from_string(j.at("variant").get<std::string>());
  s.m = j.value("m", Index{0});
  s.s = j.value("s", Index{0});
  s.seed = j.value("seed", std::uint64_t{0});
  const std::string side = j.value("side", std::string("left"));
  if (side != "left" && side != "right") throw std::invalid_argument("sketch side must be 'left' or 'right'");
  s.side = side == "left" ? Side::Left : Side::Right;
  s.input_dim = j.value("n", Index{0});
  if (j.contains("stages")) s.stages = j.at("stages").get<std::vector<SketchSpec>>();
  validate(s);
}

void to_json(Json& j, const SizePolicy& p) {
  j = Json{{"k_sparse", p.k_sparse}, {"k_srht", p.k_srht},   {"k_gauss", p.k_gauss},
           {"k_subspace", p.k_subspace}, {"k_affine", p.k_affine}, {"k_cca", p.k_cca},
           {"k_lowrank", p.k_lowrank}, {"k_wide", p.k_wide},   {"gamma", p.gamma},
           {"provenance", p.provenance}};
}

void from_json(const Json& j, SizePolicy& p) {
  const SizePolicy d;
  p.k_sparse = j.value("k_sparse", d.k_sparse);
  p.k_srht = j.value("k_srht", d.k_srht);
  p.k_gauss = j.value("k_gauss", d.k_gauss);
  p.k_subspace = j.value("k_subspace", d.k_subspace);
  p.k_affine = j.value("k_affine", d.k_affine);
  p.k_cca = j.value("k_cca", d.k_cca);
  p.k_lowrank = j.value("k_lowrank", d.k_lowrank);
  p.k_wide = j.value("k_wide", d.k_wide);
  p.gamma = j.value("gamma", d.gamma);
  p.provenance = j.value("provenance", d.provenance);
  for (double v : {p.k_sparse, p.k_srht, p.k_gauss, p.k_subspace, p.k_affine, p.k_cca, p.k_lowrank, p.k_wide})
    if (!(v > 0.0)) throw std::invalid_argument("size policy constants must be > 0");
}

void to_json(Json& j, const EmbedReport& r) {
  j = Json{{"condition", to_string(r.condition)},
           {"deviation", r.deviation},
           {"threshold", r.threshold},
           {"pass", r.pass},
           {"trials", r.trials},
           {"passes", r.passes},
           {"required_fraction", r.required_fraction}};
  if (!r.note.empty()) j["note"] = r.note;
}

Json matrix_json(const MatrixRef& M) {
  Json rows = Json::array();
  for (Index i = 0; i < M.rows(); ++i) {
    Json row = Json::array();
    for (Index c = 0; c < M.cols(); ++c) row.push_back(M(i, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

void to_json(Json& j, const RidgeSolution& s) {
  j = Json{{"method", s.method},
           {"objective", s.objective},
           {"x", matrix_json(s.x)},
           {"sketches", s.sketches},
           {"sketch_rows", s.sketch_rows},
           {"min_norm", s.min_norm},
           {"guard_applied", s.guard_applied},
           {"wall_seconds", s.wall_seconds}};
}

void to_json(Json& j, const LowRankFactors& f) {
  j = Json{{"k", f.k},
           {"lambda", f.lambda},
           {"objective", f.objective},
           {"sd", f.sd},
           {"rank_deficient", f.rank_deficient},
           {"sketches", f.sketches}};
}

void to_json(Json& j, const CcaResult& r) {
  Json sig = Json::array();
  for (Index i = 0; i < r.sigmas.size(); ++i) sig.push_back(r.sigmas(i));
  j = Json{{"q", r.q},          {"lambda1", r.lambda1}, {"lambda2", r.lambda2}, {"sigmas", sig},
           {"U", matrix_json(r.U)}, {"V", matrix_json(r.V)}, {"sketches", r.sketches}};
}

void to_json(Json& j, const CcaValidation& v) {
  j = Json{{"eta", v.eta},
           {"max_sigma_dev", v.max_sigma_dev},
           {"max_constraint_dev", v.max_constraint_dev},
           {"max_alignment_dev", v.max_alignment_dev},
           {"pass", v.pass},
           {"trace_gap", v.trace_gap}};
}

void to_json(Json& j, const StatDimEstimate& e) {
  j = Json{{"estimate", e.estimate},
           {"z_prime", e.z_prime},
           {"gamma_hat", e.gamma_hat},
           {"certificate", {{"lower", e.lower}, {"upper", e.upper}, {"binding", e.binding}}}};
  if (e.exact_available) j["exact"] = e.exact;
}

void to_json(Json& j, const GeneratorSpec& g) {
  j = Json{{"n", g.n},
           {"d", g.d},
           {"shape", to_string(g.shape)},
           {"param", g.param},
           {"sigma1", g.sigma1},
           {"rank", g.rank},
           {"noise", g.noise},
           {"density", g.density},
           {"rhs_cols", g.rhs_cols},
           {"rhs_noise", g.rhs_noise},
           {"cols_b", g.cols_b},
           {"cca_coupling", g.cca_coupling}};
}

void from_json(const Json& j, GeneratorSpec& g) {
  const GeneratorSpec d;
  g.n = j.value("n", d.n);
  g.d = j.value("d", d.d);
  g.shape = spectrum_shape_from_string(j.value("shape", to_string(d.shape)));
  g.param = j.value("param", d.param);
  g.sigma1 = j.value("sigma1", d.sigma1);
  g.rank = j.value("rank", d.rank);
  g.noise = j.value("noise", d.noise);
  g.density = j.value("density", d.density);
  g.rhs_cols = j.value("rhs_cols", d.rhs_cols);
  g.rhs_noise = j.value("rhs_noise", d.rhs_noise);
  g.cols_b = j.value("cols_b", d.cols_b);
  g.cca_coupling = j.value("cca_coupling", d.cca_coupling);
  g.validate();
}

void to_json(Json& j, const LambdaRule& r) { j = Json{{"rule", to_string(r.kind)}, {"value", r.value}}; }

void from_json(const Json& j, LambdaRule& r) {
  if (j.is_number()) {
    r = LambdaRule{LambdaRule::Kind::Absolute, j.get<double>()};
    return;
  }
  r.kind = lambda_kind_from_string(j.value("rule", std::string("absolute")));
  r.value = j.value("value", 1.0);
}

void to_json(Json& j, const TrialConfig& c) {
  j = Json{{"task", c.task},     {"generator", c.gen},     {"lambda", c.lambda},
           {"eps", c.eps},       {"k", c.k},               {"seeds", c.seeds},
           {"sd_source", c.sd_source}, {"measure", c.measure}, {"genreg_mode", c.genreg_mode},
           {"variant", c.variant}, {"schatten_p", c.schatten_p}, {"repeats", c.repeats},
           {"embed_trials", c.embed_trials}, {"pass_threshold", c.pass_threshold}, {"policy", c.policy}};
  if (c.lambda2) j["lambda2"] = *c.lambda2;
  if (c.sketch) j["sketch"] = *c.sketch;
  if (c.matrix_path) j["matrix"] = *c.matrix_path;
}

void from_json(const Json& j, TrialConfig& c) {
  const TrialConfig d;
  c.task = j.value("task", d.task);
  if (j.contains("generator")) c.gen = j.at("generator").get<GeneratorSpec>();
  if (j.contains("lambda")) c.lambda = j.at("lambda").get<LambdaRule>();
  if (j.contains("lambda2")) c.lambda2 = j.at("lambda2").get<LambdaRule>();
  c.eps = j.value("eps", d.eps);
  c.k = j.value("k", d.k);
  if (j.contains("sketch")) c.sketch = j.at("sketch").get<SketchSpec>();
  if (j.contains("seeds")) {
    const auto& s = j.at("seeds");
    c.seeds = s.is_string() ? parse_seed_range(s.get<std::string>()) : s.get<std::vector<std::uint64_t>>();
  }
  c.sd_source = j.value("sd_source", d.sd_source);
  c.measure = j.value("measure", d.measure);
  c.genreg_mode = j.value("genreg_mode", d.genreg_mode);
  c.variant = j.value("variant", d.variant);
  c.schatten_p = j.value("schatten_p", d.schatten_p);
  c.repeats = j.value("repeats", d.repeats);
  c.embed_trials = j.value("embed_trials", d.embed_trials);
  c.pass_threshold = j.value("pass_threshold", d.pass_threshold);
  if (j.contains("policy")) c.policy = j.at("policy").get<SizePolicy>();
  if (j.contains("matrix")) c.matrix_path = j.at("matrix").get<std::string>();
  c.validate();
}

Json record_json(const TrialRecord& r, bool omit_timings) {
  Json j{{"task", r.task},
         {"config_hash", r.config_hash},
         {"seed", r.seed},
         {"objective_sketched", r.objective_sketched},
         {"objective_exact", r.objective_exact},
         {"ratio", r.ratio},
         {"pass", r.pass},
         {"sketch_dims", r.sketch_dims}};
  if (!omit_timings)
    j["timings"] = {{"sketch_apply", r.timings.sketch_apply},
                    {"small_solve", r.timings.small_solve},
                    {"total", r.timings.total}};
  if (!r.extra.empty()) {
    Json extra = Json::object();
    for (const auto& [k, v] : r.extra) extra[k] = v;
    j["extra"] = extra;
  }
  return j;
}

Json summary_json(const TrialSummary& s) {
  return Json{{"summary", true},
              {"task", s.task},
              {"config_hash", s.config_hash},
              {"trials", s.trials},
              {"passed", s.passed},
              {"pass_fraction", s.pass_fraction},
              {"median_ratio", s.median_ratio},
              {"threshold", s.threshold},
              {"ok", s.ok}};
}

void to_json(Json& j, const CalibrationResult& r) {
  Json pts = Json::array();
  for (const auto& p : r.points) pts.push_back({{"value", p.value}, {"pass_rate", p.pass_rate}, {"trials", p.trials}});
  j = Json{{"constant", r.constant}, {"family", r.family},     {"value", r.value},
           {"pass_rate", r.pass_rate}, {"monotone", r.monotone}, {"trials", r.trials},
           {"points", pts}};
}

std::string to_jsonl(const TrialReport& report, bool omit_timings) {
  std::string out;
  for (const auto& r : report.records) out += record_json(r, omit_timings).dump() + "\n";
  out += summary_json(report.summary).dump() + "\n";
  return out;
}

std::string to_csv(const TrialReport& report, bool omit_timings) {
  std::ostringstream os;
  os.precision(17);
  os << "task,config_hash,seed,objective_sketched,objective_exact,ratio,pass,sketch_dims";
  if (!omit_timings) os << ",sketch_apply,small_solve,total";
  os << "\n";
  for (const auto& r : report.records) {
    os << r.task << ',' << r.config_hash << ',' << r.seed << ',' << r.objective_sketched << ','
       << r.objective_exact << ',' << r.ratio << ',' << (r.pass ? 1 : 0) << ',';
    for (std::size_t i = 0; i < r.sketch_dims.size(); ++i) os << (i ? ";" : "") << r.sketch_dims[i];
    if (!omit_timings) os << ',' << r.timings.sketch_apply << ',' << r.timings.small_solve << ',' << r.timings.total;
    os << "\n";
  }
  return os.str();
}

SketchSpec sketch_from_json_text(const std::string& text) { return Json::parse(text).get<SketchSpec>(); }

} // namespace sketchreg
