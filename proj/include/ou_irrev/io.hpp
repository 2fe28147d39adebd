#pragma once

// Model files, canonical JSON reports and CSV output.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "ou_irrev/matrix.hpp"
#include "ou_irrev/model.hpp"
#include "ou_irrev/sampler.hpp"

namespace ouirr {

/// {"B": [[...]], "Gamma": [[...]]}. ValidationError on malformed content.
LinearModel model_from_json(const nlohmann::json& j);
/// IoError when the file cannot be read.
LinearModel read_model_file(const std::filesystem::path& path);
nlohmann::json model_to_json(const LinearModel& model);

nlohmann::json matrix_to_json(const Mat& m);

/// Sorted keys, no whitespace, floats as %.17g, non-finite floats as null.
std::string canonical_json(const nlohmann::json& j);

/// Shortest decimal string that parses back to the same double.
std::string format_shortest(double v);

/// Header `t,x1,...,xn,W`, one row per step including t = 0.
void write_trajectory_csv(std::ostream& os, const Trajectory& tr);

}  // namespace ouirr
