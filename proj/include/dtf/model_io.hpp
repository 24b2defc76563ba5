#pragma once

#include <string>

#include <json.hpp>

#include "dtf/density.hpp"

namespace dtf {

inline constexpr int kModelFormatVersion = 1;

// Model files are JSON with explicit integer arrays for permutations and
// domains; base probabilities are stored as exact counts plus alpha and
// recomputed on load, so save -> load -> save is byte-identical.
nlohmann::ordered_json model_to_json(const DtfModel& model);
DtfModel model_from_json(const nlohmann::ordered_json& j);

void save_model(const std::string& path, const DtfModel& model);
DtfModel load_model(const std::string& path);

} // namespace dtf
