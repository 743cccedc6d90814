#pragma once

#include <string>

#include <json.hpp>

#include "cbond/analytic.hpp"
#include "cbond/model.hpp"

namespace cbond {

/// Parses the seven-field parameter object {"r","q","sigma","lambda","c","K",
/// "gamma"}; unknown keys are rejected, missing keys are reported by name.
/// The result is validated.
ModelParams params_from_json(const nlohmann::json& j);
ModelParams params_from_json_file(const std::string& path);

nlohmann::json params_to_json(const ModelParams& p);

/// Serialized solution: regime, coefficients, boundaries. Loading rebuilds
/// the solution from (params, x_star), so prices round-trip exactly.
nlohmann::json solution_to_json(const AnalyticSolution& sol);
AnalyticSolution solution_from_json(const nlohmann::json& j);

/// Writes via a temporary file in the target directory plus rename, so an
/// interrupted run never leaves a partial file at the destination.
void atomic_write_file(const std::string& path, const std::string& contents);

/// CSV number format: '.' decimal separator, 12 significant digits.
std::string fmt_csv(double v);

}  // namespace cbond
