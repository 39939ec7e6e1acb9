#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "lisense/scene.hpp"

namespace lisense {

class ScenarioFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scenario files are JSON objects with the keys room, lis, emitters, scatterers,
/// humans, snr_db, averaging_count, rng_seed and noiseless. Within lis, `spacing`
/// defaults to half a wavelength and a missing origin centers the array.
/// Unknown keys are rejected.
ScenarioConfig scenario_from_json(const nlohmann::json& doc);
nlohmann::json scenario_to_json(const ScenarioConfig& cfg);

ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Canonical text form (sorted keys, two-space indent, trailing newline).
std::string canonical_scenario(const ScenarioConfig& cfg);

/// FNV-1a hash of the canonical form, as 16 hex digits.
std::string scenario_hash(const ScenarioConfig& cfg);

}  // namespace lisense
