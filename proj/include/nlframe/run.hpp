#pragma once

#include <json.hpp>
#include <string>

#include "nlframe/config.hpp"
#include "nlframe/maps.hpp"
#include "nlframe/spaces.hpp"

namespace nlframe {

// Build a DenseOperator from an [operator] config block:
//   kind = "file"|"matrix"|"seeded_gaussian"|"seeded_orthogonal_diag"
DenseOperator operator_from_spec(const nlohmann::json& spec,
                                 const std::string& base_dir = "");

// Build a ground-truth signal from a [signal] block:
//   kind = "inline"|"seeded_sparse"|"seeded_dense"
Vector signal_from_spec(const nlohmann::json& spec, int dim, std::uint64_t seed);

// Additive noise from a [noise] block (norm = "l2"|"linf", magnitude, seed).
Vector noise_from_spec(const nlohmann::json& spec, int dim, std::uint64_t seed);

// certify -> gate-check -> solve/recover pipeline; writes report JSON, trace
// CSV and a summary table; identical config + seed give byte-identical
// numeric artifacts (timings live only in the manifest).
RunManifest run_experiment(const ExperimentConfig& cfg,
                           const std::string& base_dir = "");

// Re-emit a stored report in another format: json | csv | md-table.
std::string emit_report(const nlohmann::json& report, const std::string& format);

}  // namespace nlframe
