#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "nlframe/common.hpp"

namespace nlframe {

// Minimal TOML reader covering the config surface: [table] / [a.b] headers,
// key = value with strings, numbers, booleans, and (nested, possibly
// multiline) arrays. Full TOML is out of scope; JSON configs are first-class.
nlohmann::json parse_toml_subset(const std::string& text);

// .toml -> subset parser, .json -> JSON
nlohmann::json load_config_file(const std::string& path);

// Canonical serialization (sorted keys, shortest-round-trip numbers) and the
// FNV-1a hash of it; stable under field reordering in the source file.
std::string canonical_json(const nlohmann::json& j);
std::uint64_t config_hash(const nlohmann::json& j);

struct ExperimentConfig {
  nlohmann::json raw;

  std::string mode;  // certify | solve | recover | triple
  nlohmann::json map_spec;       // may be null
  nlohmann::json operator_spec;  // may be null
  nlohmann::json plan;           // sampling plan (may be empty object)
  nlohmann::json solver;         // algo/mu/tol/max_iter/force
  nlohmann::json signal;         // ground-truth source
  nlohmann::json noise;          // norm/magnitude/seed
  nlohmann::json recover;        // eps/method/triple/pipeline
  nlohmann::json certify;        // out_norm_p/with_alpha/gamma_ks
  std::string triple_spec;
  std::string out_report;
  std::string out_trace;
  std::string out_summary;
  std::uint64_t seed = 0;
  int threads = 1;

  // Throws InvalidInput listing every missing/invalid field.
  static ExperimentConfig from_json(const nlohmann::json& j);
};

struct RunManifest {
  std::string version = kVersion;
  std::string config_hash_hex;
  std::uint64_t seed = 0;
  double wall_ms = 0.0;
  std::vector<std::string> artifacts;

  nlohmann::json to_json() const;
};

}  // namespace nlframe
