#pragma once

// JSON model and sample files.
//
// Model:  {"loci": [{"K": 2, "theta": 1.0, "P": [[..],[..]], "pi": [..]}, ...],
//          "r": [r_1, ..., r_{L-1}], "rho": 100.0}
//         "pi" and "rho" are optional.
// Sample: {"sample": [{"haplotype": [1, "*"], "count": 2}, ...]}
//         Alleles are 1-based; "*" marks an unspecified locus. Repeated
//         haplotypes are merged by summing their counts.

#include "json.hpp"
#include <string>

#include "coalrec/haplotype.hpp"
#include "coalrec/model.hpp"

namespace coalrec {

/// Throws ModelValidationError with the JSON path of the offending field.
ModelParams parse_model(const nlohmann::json& doc);
SampleConfig parse_sample(const nlohmann::json& doc, const ModelParams& params);

/// Throw IoError when the file cannot be read and ModelValidationError when
/// it is not valid JSON or fails validation.
ModelParams load_model(const std::string& path);
SampleConfig load_sample(const std::string& path, const ModelParams& params);

nlohmann::json model_to_json(const ModelParams& params);
nlohmann::json sample_to_json(const SampleConfig& n);

/// 17 significant digits, the format used for every reported probability.
std::string format_real(double x);

}  // namespace coalrec
