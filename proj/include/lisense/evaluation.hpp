#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "lisense/active.hpp"
#include "lisense/passive.hpp"
#include "lisense/random.hpp"
#include "lisense/scene.hpp"
#include "lisense/sensor.hpp"

namespace lisense {

struct MatchedPair {
  std::size_t truth = 0;
  std::size_t detection = 0;
  double error = 0.0;
};

struct MatchResult {
  std::vector<MatchedPair> pairs;
  std::vector<std::size_t> misses;
  std::vector<std::size_t> false_alarms;
};

/// Greedy assignment: repeatedly pairs the globally closest (truth, detection)
/// couple within `gate` meters. Ties go to the lower truth index, then the lower
/// detection index.
MatchResult match_detections(const std::vector<WorldXY>& truth,
                             const std::vector<WorldXY>& detected, double gate);

struct EcdfPoint {
  double value = 0.0;
  double fraction = 0.0;
};

/// Right-continuous empirical CDF at each distinct sample value.
std::vector<EcdfPoint> ecdf(std::vector<double> samples);

/// Smallest sample x with F(x) >= p. Throws std::domain_error for empty input.
double ecdf_quantile(std::vector<double> samples, double p);

struct TrialReport {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  MatchResult match;
  std::size_t truth_count = 0;
  std::size_t detected_count = 0;
  double detection_rate = 0.0;
  std::vector<double> errors;
};

TrialReport make_report(std::size_t trial, std::uint64_t seed, MatchResult match,
                        std::size_t truth_count, std::size_t detected_count);

/// Runs `trial(index, seed)` for every trial with seed derive_seed(master, purpose, index).
/// Reports come back in trial order whatever the thread count.
std::vector<TrialReport> run_monte_carlo(
    std::size_t trials, std::uint64_t master_seed, std::string_view purpose, unsigned threads,
    const std::function<TrialReport(std::size_t, std::uint64_t)>& trial);

struct TrialSummary {
  std::size_t trials = 0;
  double mean_detection_rate = 0.0;
  double mean_detections = 0.0;
  double mean_error = 0.0;
  double min_error = 0.0;
  double max_error = 0.0;
  std::size_t error_count = 0;
};

TrialSummary summarize(const std::vector<TrialReport>& reports);

/// All matched errors of all trials in trial order.
std::vector<double> pooled_errors(const std::vector<TrialReport>& reports);

struct PlacementRules {
  /// Keep placements this far inside the array footprint, meters.
  double array_margin = 0.5;
  double min_emitter_separation = 0.0;
  /// Horizontal clearance between an emitter and any object (beyond a scatterer's radius).
  double emitter_clearance = 0.5;
  double min_human_separation = 0.6;
  /// Horizontal clearance between a human and a scatterer edge.
  double human_scatterer_clearance = 0.5;
  /// Draw emitter heights uniformly in [1.8, max_emitter_height] instead of 1.8 m.
  bool random_emitter_height = false;
  double max_emitter_height = 2.2;
};

/// Uniform random emitters over the array interior with random symbol phases.
/// Throws std::runtime_error when the constraints cannot be met.
std::vector<Emitter> random_emitters(const ScenarioConfig& scene, std::size_t count, Rng& rng,
                                     const PlacementRules& rules = {});

std::vector<Human> random_humans(const ScenarioConfig& scene, std::size_t count, Rng& rng,
                                 const PlacementRules& rules = {});

struct ActiveExperiment {
  ScenarioConfig base;
  std::size_t users = 3;
  PlacementRules placement;
  ActiveParams detection;
  double gate = 0.75;
};

/// One snapshot with all users transmitting together; errors are matched
/// detection-to-truth distances.
TrialReport run_active_trial(const ActiveExperiment& exp, const LisSensor& sensor,
                             std::size_t trial, std::uint64_t seed);

enum class TransmissionMode {
  /// One radio map per transmission.
  sequential,
  /// All transmissions superposed in a single radio map.
  simultaneous,
};

struct PassiveExperiment {
  /// Room, array, static scatterers and noise settings.
  ScenarioConfig base;
  std::size_t calibration_transmissions = 10;
  std::size_t detection_transmissions = 10;
  std::size_t humans = 4;
  TransmissionMode mode = TransmissionMode::sequential;
  PlacementRules placement;
  /// When detection.transmitters_per_map is unset, trials seed template removal
  /// with the known number of transmitters per map.
  PassiveParams detection;
  double gate = 0.75;
};

/// Radio maps for a list of transmissions in the given mode.
std::vector<RadioMap> capture_transmissions(const LisSensor& sensor, const ScenarioConfig& scene,
                                            const std::vector<Emitter>& transmissions,
                                            TransmissionMode mode, std::uint64_t noise_seed);

/// Calibrates a fresh mask with random transmissions in the empty room, then
/// detects randomly placed humans.
TrialReport run_passive_trial(const PassiveExperiment& exp, const LisSensor& sensor,
                              const std::vector<TransmitterTemplate>& templates,
                              std::size_t trial, std::uint64_t seed);

/// Same as run_passive_trial with two humans side by side, `gap` meters apart
/// edge to edge, at a random location and orientation. The pair's midpoint and
/// axis, the transmitters and the noise depend only on `seed`, so a sweep over
/// gaps reuses the same draws. `gap` must lie in [0, 1.3] m; other values throw
/// std::invalid_argument.
TrialReport run_separation_trial(const PassiveExperiment& exp, const LisSensor& sensor,
                                 const std::vector<TransmitterTemplate>& templates, double gap,
                                 std::size_t trial, std::uint64_t seed);

}  // namespace lisense
