#pragma once

#include <filesystem>

#include <json.hpp>

#include "kcgof/models.hpp"

namespace kcgof {

/// Builds a model from a config document. Field names:
///
///   {"kind": "linear_gaussian", "coeffs": [...], "intercept": 0, "noise_var": 1}
///   {"kind": "hetero_gaussian", "coeffs": [...], "intercept": 0, "base_var": 1,
///    "bump_height": 10, "bump_center": [...], "bump_width": 0.8}
///   {"kind": "quad_gaussian", "a": 0.1, "b": 1, "c": 1, "noise_var": 1}
///   {"kind": "cond_gauss_mixture", "dx": 2,
///    "components": [{"weight": 1, "mean": [...], "vars": [...]}]}
///
/// "dx" and "dy" are optional except for the mixture's dx; when present they
/// must agree with the parameters. Throws ParseError whose message starts
/// with the offending field path.
ConditionalModel load_model(const nlohmann::json& config);
ConditionalModel load_model_file(const std::filesystem::path& path);

/// Inverse of load_model.
nlohmann::json model_to_json(const ConditionalModel& model);

}  // namespace kcgof
