#pragma once

#include "skelfit/skelify.h"

#include <filesystem>
#include <json.hpp>
#include <string>
#include <string_view>

namespace skelfit {

// Fit configuration documents (JSON). Every field is optional; missing fields keep
// the value of the base config the document is applied to.
//
//   {
//     "format": "skelfit-fit-config", "version": 1,
//     "stages": [{"groups": ["camera" | "root" | "pose" | "shape", ...],
//                 "max_iterations": int, "tolerance": real}],
//     "weights": {"data": real, "shape": real, "pose": real},
//     "sigma": real, "min_confidence": real,
//     "optimizer": {"history": int, "max_line_search": int, "armijo": real,
//                   "convergence_window": int, "gradient_tolerance": real}
//   }
inline constexpr int kFitConfigVersion = 1;

FitConfig parse_fit_config(std::string_view document, const FitConfig &base);
std::string serialize_fit_config(const FitConfig &config);
FitConfig load_fit_config(const std::filesystem::path &path, const FitConfig &base);

const char *to_string(ParamGroup group);
ParamGroup parse_param_group(std::string_view name);

// {"q": [...], "beta": [...], "camera": {"scale": s, "translation": [tx, ty]}}
nlohmann::json fit_state_json(const FitState &state);
// `path` prefixes error messages. The camera is optional and defaults to identity.
FitState parse_fit_state(const nlohmann::json &j, const std::string &path);

// State plus {"objective": {"total", "data", "shape", "pose", "weighted": {...}},
// "initial_objective": ..., "converged", "iterations", "history"}.
nlohmann::json fit_result_json(const FitResult &result);

} // namespace skelfit
