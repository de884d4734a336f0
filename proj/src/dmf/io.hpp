// JSON/CSV serialization of every artifact the library exchanges. Unknown
// keys in inputs are rejected (auxiliary metadata keys every writer emits are
// tolerated, so written artifacts round-trip). Numbers in CSV use '.' decimal
// and 17 significant digits so doubles round-trip losslessly.
#pragma once

#include <string>

#include "dmf/classify.hpp"
#include "dmf/verify.hpp"
#include "json.hpp"  // vendored nlohmann/json

namespace dmf {

using json = nlohmann::json;

json parse_json_text(const std::string& text);
json load_json_file(const std::string& path);

// Rejects keys outside `allowed` plus the shared metadata keys
// (config/generator/timestamp/schema/note).
void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& context);

ProblemSpec problem_from_json(const json& j);
json problem_to_json(const ProblemSpec& p);

CriticalSpec spec_from_json(const json& j);
json spec_to_json(const CriticalSpec& s);
// Accepts a bare spec object or a family document ({"specs": [...]}) with an
// index; an embedded "problem" is surfaced when present.
CriticalSpec spec_from_document(const json& j, int index, ProblemSpec* embedded_problem);

FactorStack stack_from_json(const json& j, std::string* coord = nullptr);
json stack_to_json(const FactorStack& w, const std::string& coord);

json thresholds_to_json(const Thresholds& t);
json root_profile_to_json(const RootProfile& rp);
json scalar_min_to_json(const ScalarMinResult& m);
json family_to_json(const SpecFamily& fam);
json validation_to_json(const ValidationReport& rep);
json classification_to_json(const Classification& c);
json certificate_to_json(const Certificate& cert);
json regularization_to_json(const RegularizationReport& rep);
json probe_to_json(const ProbeReport& rep);
json numeric_classification_to_json(const NumericClassification& nc);
json train_to_json(const TrainResult& res);

std::string format_double(double v);  // 17 significant digits, '.' decimal
std::string landscape_to_csv(const LandscapeGrid& grid, const std::string& header_comment);

// Write via temp file + rename in the target directory.
void atomic_write_file(const std::string& path, const std::string& content);

}  // namespace dmf
