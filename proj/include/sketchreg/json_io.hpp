#pragma once

#include "sketchreg/cca.hpp"
#include "sketchreg/embedding.hpp"
#include "sketchreg/lowrank.hpp"
#include "sketchreg/ridge.hpp"
#include "sketchreg/size_policy.hpp"
#include "sketchreg/sketch.hpp"
#include "sketchreg/statdim.hpp"
#include "sketchreg/trials.hpp"

#include <json.hpp>

#include <string>

namespace sketchreg {

using Json = nlohmann::ordered_json;

/// {variant, m, s?, seed, side, n?, stages?}; Composed specs list their stages
/// outermost first.
void to_json(Json& j, const SketchSpec& s);
void from_json(const Json& j, SketchSpec& s);

void to_json(Json& j, const SizePolicy& p);
void from_json(const Json& j, SizePolicy& p);

void to_json(Json& j, const EmbedReport& r);
void to_json(Json& j, const RidgeSolution& s);
void to_json(Json& j, const LowRankFactors& f);
void to_json(Json& j, const CcaResult& r);
void to_json(Json& j, const CcaValidation& v);
void to_json(Json& j, const StatDimEstimate& e);

void to_json(Json& j, const GeneratorSpec& g);
void from_json(const Json& j, GeneratorSpec& g);
void to_json(Json& j, const LambdaRule& r);
void from_json(const Json& j, LambdaRule& r);
void to_json(Json& j, const TrialConfig& c);
void from_json(const Json& j, TrialConfig& c);

/// Timings are left out when `omit_timings` is set.
Json record_json(const TrialRecord& r, bool omit_timings);
Json summary_json(const TrialSummary& s);
void to_json(Json& j, const CalibrationResult& r);

Json matrix_json(const MatrixRef& M);

/// One JSON object per line.
std::string to_jsonl(const TrialReport& report, bool omit_timings);
/// Header plus one row per record; the summary is not included.
std::string to_csv(const TrialReport& report, bool omit_timings);

SketchSpec sketch_from_json_text(const std::string& text);

} // namespace sketchreg
