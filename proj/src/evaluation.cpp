#include "lisense/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

#include "lisense/parallel.hpp"

namespace lisense {

MatchResult match_detections(const std::vector<WorldXY>& truth,
                             const std::vector<WorldXY>& detected, double gate) {
  if (!(gate > 0.0)) throw std::invalid_argument("match_detections: gate must be > 0");
  struct Candidate {
    double dist;
    std::size_t t;
    std::size_t d;
  };
  std::vector<Candidate> candidates;
  for (std::size_t t = 0; t < truth.size(); ++t) {
    for (std::size_t d = 0; d < detected.size(); ++d) {
      const double dist = std::hypot(truth[t].x - detected[d].x, truth[t].y - detected[d].y);
      if (dist <= gate) candidates.push_back({dist, t, d});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(a.dist, a.t, a.d) < std::tie(b.dist, b.t, b.d);
  });

  MatchResult result;
  std::vector<bool> truth_used(truth.size(), false);
  std::vector<bool> det_used(detected.size(), false);
  for (const Candidate& c : candidates) {
    if (truth_used[c.t] || det_used[c.d]) continue;
    truth_used[c.t] = true;
    det_used[c.d] = true;
    result.pairs.push_back({c.t, c.d, c.dist});
  }
  for (std::size_t t = 0; t < truth.size(); ++t) {
    if (!truth_used[t]) result.misses.push_back(t);
  }
  for (std::size_t d = 0; d < detected.size(); ++d) {
    if (!det_used[d]) result.false_alarms.push_back(d);
  }
  return result;
}

std::vector<EcdfPoint> ecdf(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  std::vector<EcdfPoint> out;
  const auto n = static_cast<double>(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (i + 1 < samples.size() && samples[i + 1] == samples[i]) continue;
    out.push_back({samples[i], static_cast<double>(i + 1) / n});
  }
  return out;
}

double ecdf_quantile(std::vector<double> samples, double p) {
  if (samples.empty()) throw std::domain_error("ecdf_quantile: no samples");
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (static_cast<double>(i + 1) / n >= p) return samples[i];
  }
  return samples.back();
}

TrialReport make_report(std::size_t trial, std::uint64_t seed, MatchResult match,
                        std::size_t truth_count, std::size_t detected_count) {
  TrialReport r;
  r.trial = trial;
  r.seed = seed;
  r.truth_count = truth_count;
  r.detected_count = detected_count;
  for (const MatchedPair& p : match.pairs) r.errors.push_back(p.error);
  r.detection_rate =
      truth_count == 0 ? 1.0
                       : static_cast<double>(match.pairs.size()) / static_cast<double>(truth_count);
  r.match = std::move(match);
  return r;
}

std::vector<TrialReport> run_monte_carlo(
    std::size_t trials, std::uint64_t master_seed, std::string_view purpose, unsigned threads,
    const std::function<TrialReport(std::size_t, std::uint64_t)>& trial) {
  std::vector<TrialReport> reports(trials);
  parallel_for(trials, threads, [&](std::size_t i) {
    reports[i] = trial(i, derive_seed(master_seed, purpose, i));
  });
  return reports;
}

TrialSummary summarize(const std::vector<TrialReport>& reports) {
  TrialSummary s;
  s.trials = reports.size();
  if (reports.empty()) return s;
  double rate = 0.0;
  double detections = 0.0;
  double err_sum = 0.0;
  s.min_error = std::numeric_limits<double>::infinity();
  s.max_error = 0.0;
  for (const TrialReport& r : reports) {
    rate += r.detection_rate;
    detections += static_cast<double>(r.match.pairs.size());
    for (double e : r.errors) {
      err_sum += e;
      s.min_error = std::min(s.min_error, e);
      s.max_error = std::max(s.max_error, e);
      ++s.error_count;
    }
  }
  const auto n = static_cast<double>(reports.size());
  s.mean_detection_rate = rate / n;
  s.mean_detections = detections / n;
  if (s.error_count > 0) {
    s.mean_error = err_sum / static_cast<double>(s.error_count);
  } else {
    s.min_error = 0.0;
  }
  return s;
}

std::vector<double> pooled_errors(const std::vector<TrialReport>& reports) {
  std::vector<double> out;
  for (const TrialReport& r : reports) out.insert(out.end(), r.errors.begin(), r.errors.end());
  return out;
}

namespace {

constexpr int kMaxPlacementAttempts = 10000;
constexpr double kMaxSeparationGap = 1.3;

struct Region {
  double x0, x1, y0, y1;
};

Region placement_region(const ScenarioConfig& scene, double margin) {
  const LisArrayConfig& lis = scene.lis;
  Region r{lis.origin_x + margin, lis.origin_x + lis.footprint_x() - margin,
           lis.origin_y + margin, lis.origin_y + lis.footprint_y() - margin};
  if (!(r.x1 > r.x0) || !(r.y1 > r.y0)) {
    throw std::runtime_error("placement: array margin leaves no room for placements");
  }
  return r;
}

double planar_distance(double ax, double ay, double bx, double by) {
  return std::hypot(ax - bx, ay - by);
}

}  // namespace

namespace {

// Planar keep-out segment for emitter placement; a human is a degenerate one.
struct KeepOut {
  double ax, ay, bx, by;
};

double distance_to_segment(double x, double y, const KeepOut& k) {
  const double vx = k.bx - k.ax;
  const double vy = k.by - k.ay;
  const double len2 = vx * vx + vy * vy;
  const double t =
      len2 > 0.0 ? std::clamp(((x - k.ax) * vx + (y - k.ay) * vy) / len2, 0.0, 1.0) : 0.0;
  return planar_distance(x, y, k.ax + t * vx, k.ay + t * vy);
}

std::vector<KeepOut> human_keep_outs(const std::vector<Human>& humans) {
  std::vector<KeepOut> out;
  for (const Human& h : humans) out.push_back({h.center.x, h.center.y, h.center.x, h.center.y});
  return out;
}

std::vector<Emitter> place_emitters(const ScenarioConfig& scene, std::size_t count, Rng& rng,
                                    const PlacementRules& rules,
                                    const std::vector<KeepOut>& keep_out) {
  const Region region = placement_region(scene, rules.array_margin);
  std::uniform_real_distribution<double> ux(region.x0, region.x1);
  std::uniform_real_distribution<double> uy(region.y0, region.y1);
  std::uniform_real_distribution<double> uphase(0.0, 2.0 * kPi);
  std::uniform_real_distribution<double> uz(kEmitterHeight, rules.max_emitter_height);

  std::vector<Emitter> out;
  for (std::size_t k = 0; k < count; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxPlacementAttempts && !placed; ++attempt) {
      const double x = ux(rng);
      const double y = uy(rng);
      bool ok = true;
      for (const Emitter& e : out) {
        ok = ok && planar_distance(x, y, e.position.x, e.position.y) >= rules.min_emitter_separation;
      }
      for (const Scatterer& s : scene.scatterers) {
        ok = ok && planar_distance(x, y, s.center.x, s.center.y) >= s.radius + rules.emitter_clearance;
      }
      for (const KeepOut& h : keep_out) {
        ok = ok && distance_to_segment(x, y, h) >= rules.emitter_clearance;
      }
      if (!ok) continue;
      Emitter e;
      e.position = {x, y, rules.random_emitter_height ? uz(rng) : kEmitterHeight};
      e.symbol_phase = uphase(rng);
      out.push_back(e);
      placed = true;
    }
    if (!placed) throw std::runtime_error("random_emitters: could not satisfy placement rules");
  }
  return out;
}

}  // namespace

std::vector<Emitter> random_emitters(const ScenarioConfig& scene, std::size_t count, Rng& rng,
                                     const PlacementRules& rules) {
  return place_emitters(scene, count, rng, rules, human_keep_outs(scene.humans));
}

std::vector<Human> random_humans(const ScenarioConfig& scene, std::size_t count, Rng& rng,
                                 const PlacementRules& rules) {
  const Region region = placement_region(scene, rules.array_margin);
  std::uniform_real_distribution<double> ux(region.x0, region.x1);
  std::uniform_real_distribution<double> uy(region.y0, region.y1);
  std::bernoulli_distribution rotate(0.5);

  std::vector<Human> out;
  for (std::size_t k = 0; k < count; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxPlacementAttempts && !placed; ++attempt) {
      const double x = ux(rng);
      const double y = uy(rng);
      bool ok = true;
      for (const Human& h : out) {
        ok = ok && planar_distance(x, y, h.center.x, h.center.y) >= rules.min_human_separation;
      }
      for (const Scatterer& s : scene.scatterers) {
        ok = ok && planar_distance(x, y, s.center.x, s.center.y) >=
                       s.radius + rules.human_scatterer_clearance;
      }
      if (!ok) continue;
      Human h;
      h.center = {x, y};
      if (rotate(rng)) std::swap(h.extent_x, h.extent_y);
      out.push_back(h);
      placed = true;
    }
    if (!placed) throw std::runtime_error("random_humans: could not satisfy placement rules");
  }
  return out;
}

TrialReport run_active_trial(const ActiveExperiment& exp, const LisSensor& sensor,
                             std::size_t trial, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "placement"));
  ScenarioConfig snapshot = exp.base;
  snapshot.emitters = random_emitters(snapshot, exp.users, rng, exp.placement);

  const RadioMap map = sensor.capture(snapshot, derive_seed(seed, "noise"));
  const ActiveDetectionResult found = detect_active(map, exp.detection);

  std::vector<WorldXY> truth;
  for (const Emitter& e : snapshot.emitters) truth.push_back({e.position.x, e.position.y});
  std::vector<WorldXY> detected;
  for (const Detection& d : found.detections) detected.push_back(d.world);
  return make_report(trial, seed, match_detections(truth, detected, exp.gate), truth.size(),
                     detected.size());
}

std::vector<RadioMap> capture_transmissions(const LisSensor& sensor, const ScenarioConfig& scene,
                                            const std::vector<Emitter>& transmissions,
                                            TransmissionMode mode, std::uint64_t noise_seed) {
  std::vector<RadioMap> maps;
  ScenarioConfig snapshot = scene;
  if (mode == TransmissionMode::simultaneous) {
    snapshot.emitters = transmissions;
    maps.push_back(sensor.capture(snapshot, derive_seed(noise_seed, "snapshot", 0)));
    return maps;
  }
  for (std::size_t k = 0; k < transmissions.size(); ++k) {
    snapshot.emitters = {transmissions[k]};
    maps.push_back(sensor.capture(snapshot, derive_seed(noise_seed, "snapshot", k)));
  }
  return maps;
}

namespace {

TrialReport passive_trial_with_humans(const PassiveExperiment& exp, const LisSensor& sensor,
                                      const std::vector<TransmitterTemplate>& templates,
                                      std::vector<Human> humans,
                                      const std::vector<KeepOut>& keep_out, Rng& rng,
                                      std::size_t trial, std::uint64_t seed) {
  ScenarioConfig empty_room = exp.base;
  empty_room.humans.clear();
  empty_room.emitters.clear();
  const std::vector<Emitter> calibration =
      random_emitters(empty_room, exp.calibration_transmissions, rng, exp.placement);

  ScenarioConfig occupied = empty_room;
  occupied.humans = std::move(humans);
  const std::vector<Emitter> online =
      place_emitters(occupied, exp.detection_transmissions, rng, exp.placement, keep_out);

  // The experiment knows how many devices share each map; use that count to seed
  // template removal unless the caller fixed it.
  const auto params_for = [&](std::size_t transmissions) {
    PassiveParams params = exp.detection;
    if (!params.transmitters_per_map) {
      params.transmitters_per_map =
          exp.mode == TransmissionMode::sequential ? 1 : static_cast<int>(transmissions);
    }
    return params;
  };
  PassiveDetector calibrator(sensor.lis(), templates, params_for(calibration.size()));
  PassiveDetector detector(sensor.lis(), templates, params_for(online.size()));
  detector.set_mask(calibrator.calibrate(capture_transmissions(
      sensor, empty_room, calibration, exp.mode, derive_seed(seed, "calibration-noise"))));
  const PassiveResult result = detector.detect(capture_transmissions(
      sensor, occupied, online, exp.mode, derive_seed(seed, "detection-noise")));

  std::vector<WorldXY> truth;
  for (const Human& h : occupied.humans) truth.push_back(h.center);
  std::vector<WorldXY> detected;
  for (const Component& c : result.detections) detected.push_back(c.world);
  return make_report(trial, seed, match_detections(truth, detected, exp.gate), truth.size(),
                     detected.size());
}

}  // namespace

TrialReport run_passive_trial(const PassiveExperiment& exp, const LisSensor& sensor,
                              const std::vector<TransmitterTemplate>& templates,
                              std::size_t trial, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "placement"));
  ScenarioConfig room = exp.base;
  room.humans.clear();
  std::vector<Human> humans = random_humans(room, exp.humans, rng, exp.placement);
  const std::vector<KeepOut> keep_out = human_keep_outs(humans);
  return passive_trial_with_humans(exp, sensor, templates, std::move(humans), keep_out, rng,
                                   trial, seed);
}

TrialReport run_separation_trial(const PassiveExperiment& exp, const LisSensor& sensor,
                                 const std::vector<TransmitterTemplate>& templates, double gap,
                                 std::size_t trial, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "placement"));
  ScenarioConfig room = exp.base;
  room.humans.clear();

  // The pair is drawn at the widest gap and must fit the placement rules there;
  // narrower gaps shrink it about the same midpoint, so the draws do not
  // depend on `gap`.
  if (gap < 0.0 || gap > kMaxSeparationGap) {
    throw std::invalid_argument("run_separation_trial: gap outside [0, 1.3] m");
  }
  const PlacementRules& rules = exp.placement;
  const Region region = placement_region(room, rules.array_margin);
  std::uniform_real_distribution<double> ux(region.x0, region.x1);
  std::uniform_real_distribution<double> uy(region.y0, region.y1);
  std::uniform_real_distribution<double> uangle(0.0, kPi);
  const double width = Human{}.extent_x;
  const double widest = 0.5 * (kMaxSeparationGap + width);
  bool placed = false;
  double mx = 0.0;
  double my = 0.0;
  double dx = 0.0;
  double dy = 0.0;
  for (int attempt = 0; attempt < kMaxPlacementAttempts && !placed; ++attempt) {
    mx = ux(rng);
    my = uy(rng);
    const double angle = uangle(rng);
    dx = std::cos(angle);
    dy = std::sin(angle);
    bool ok = true;
    for (const double sign : {-1.0, 1.0}) {
      const double x = mx + sign * widest * dx;
      const double y = my + sign * widest * dy;
      ok = ok && x >= region.x0 && x <= region.x1 && y >= region.y0 && y <= region.y1;
    }
    for (const Scatterer& sc : room.scatterers) {
      // Distance from the scatterer axis to the segment swept by both humans.
      const double along = std::clamp((sc.center.x - mx) * dx + (sc.center.y - my) * dy,
                                      -widest, widest);
      ok = ok && planar_distance(mx + along * dx, my + along * dy, sc.center.x, sc.center.y) >=
                     sc.radius + rules.human_scatterer_clearance;
    }
    placed = ok;
  }
  if (!placed) throw std::runtime_error("run_separation_trial: could not place the pair");

  const double half = 0.5 * (gap + width);
  std::vector<Human> humans(2);
  humans[0].center = {mx - half * dx, my - half * dy};
  humans[1].center = {mx + half * dx, my + half * dy};
  // Emitters avoid the whole segment the pair can occupy, so they are also the
  // same for every gap.
  const std::vector<KeepOut> keep_out = {
      {mx - widest * dx, my - widest * dy, mx + widest * dx, my + widest * dy}};
  return passive_trial_with_humans(exp, sensor, templates, std::move(humans), keep_out, rng,
                                   trial, seed);
}

}  // namespace lisense
