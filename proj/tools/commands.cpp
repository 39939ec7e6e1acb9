#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <stdexcept>

#include <json.hpp>

#include "lisense/active.hpp"
#include "lisense/evaluation.hpp"
#include "lisense/io.hpp"
#include "lisense/passive.hpp"
#include "lisense/random.hpp"
#include "lisense/scenario_io.hpp"
#include "lisense/sensor.hpp"

namespace lisense::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Records one invocation; written last so that it lists every artifact.
class Manifest {
 public:
  Manifest(std::string command, fs::path dir) : dir_(std::move(dir)) {
    doc_["command"] = std::move(command);
    doc_["parameters"] = json::object();
    doc_["inputs"] = json::array();
    doc_["outputs"] = json::array();
  }

  json& parameters() { return doc_["parameters"]; }
  void seed(std::uint64_t s) { doc_["seed"] = s; }

  void input(const std::string& path) {
    doc_["inputs"].push_back({{"path", path}, {"checksum", file_checksum(path)}});
  }

  /// Path of an artifact inside the output directory; the checksum is taken
  /// when the manifest is written.
  fs::path output(const std::string& name) {
    names_.push_back(name);
    return dir_ / name;
  }

  void write() {
    for (const std::string& name : names_) {
      doc_["outputs"].push_back({{"path", name}, {"checksum", file_checksum(dir_ / name)}});
    }
    write_text(dir_ / "manifest.json", doc_.dump(2) + "\n");
  }

 private:
  fs::path dir_;
  json doc_;
  std::vector<std::string> names_;
};

fs::path prepare_dir(const std::string& out) {
  fs::path dir(out);
  fs::create_directories(dir);
  return dir;
}

/// Loads a scenario and applies the command-line noise overrides. Returns
/// nullopt after printing the violations when the result is invalid.
std::optional<ScenarioConfig> load_checked(const std::string& path, const SensingOptions& s) {
  ScenarioConfig cfg = load_scenario(path);
  if (s.snr_db) cfg.snr_db = *s.snr_db;
  if (s.averaging) cfg.averaging_count = *s.averaging;
  const auto violations = validate_config(cfg);
  if (!violations.empty()) {
    for (const auto& v : violations) std::cerr << path << ": " << v << "\n";
    return std::nullopt;
  }
  return cfg;
}

std::uint64_t resolve_seed(const SensingOptions& s, const ScenarioConfig& cfg) {
  return s.seed.value_or(cfg.rng_seed);
}

FilterKernel make_kernel(const ScenarioConfig& cfg, const SensingOptions& s) {
  const double depth = s.depth.value_or(default_design_depth(cfg.room));
  const int size = s.kernel_size.value_or(
      default_kernel_size(cfg.lis.elements_x, cfg.lis.elements_y));
  return design_filter(cfg.lis.carrier_frequency, depth, size, cfg.lis.spacing);
}

LisSensor make_sensor(const ScenarioConfig& cfg, const SensingOptions& s, unsigned threads) {
  ChannelOptions channel;
  channel.wall_echoes = s.wall_echoes;
  channel.threads = threads;
  return LisSensor(cfg, make_kernel(cfg, s), channel);
}

void record_sensing(Manifest& m, const ScenarioConfig& cfg, const SensingOptions& s,
                    const FilterKernel& kernel) {
  json& p = m.parameters();
  p["snr_db"] = cfg.snr_db;
  p["averaging_count"] = cfg.averaging_count;
  p["noiseless"] = cfg.noiseless;
  p["design_depth"] = kernel.design_depth;
  p["kernel_size"] = kernel.grid.width();
  p["wall_echoes"] = s.wall_echoes;
}

ActiveParams active_params(const ActiveOptions& a) {
  ActiveParams params;
  params.min_distance = a.ka;
  params.rule.drop_ratio = a.drop;
  if (a.measure == "energy") {
    params.rule.measure = PeakMeasure::energy;
  } else if (a.measure == "magnitude") {
    params.rule.measure = PeakMeasure::magnitude;
  } else {
    throw std::invalid_argument("unknown peak measure '" + a.measure + "'");
  }
  if (a.reference == "previous") {
    params.rule.reference = DropReference::previous;
  } else if (a.reference == "first") {
    params.rule.reference = DropReference::first;
  } else {
    throw std::invalid_argument("unknown drop reference '" + a.reference + "'");
  }
  return params;
}

void record_active(Manifest& m, const ActiveOptions& a) {
  json& p = m.parameters();
  p["ka"] = a.ka;
  p["drop"] = a.drop;
  p["measure"] = a.measure;
  p["reference"] = a.reference;
}

TransmissionMode transmission_mode(const std::string& mode) {
  if (mode == "sequential") return TransmissionMode::sequential;
  if (mode == "simultaneous") return TransmissionMode::simultaneous;
  throw std::invalid_argument("unknown transmission mode '" + mode + "'");
}

PassiveParams passive_params(const PassiveOptions& p, std::size_t transmitters_per_map) {
  PassiveParams params;
  params.window_size = p.kc;
  params.threshold = p.th;
  params.min_area = p.min_area;
  if (p.connectivity == 4) {
    params.connectivity = Connectivity::four;
  } else if (p.connectivity == 8) {
    params.connectivity = Connectivity::eight;
  } else {
    throw std::invalid_argument("connectivity must be 4 or 8");
  }
  params.matching.ncc_threshold = p.ncc;
  if (transmitters_per_map > 0) params.transmitters_per_map = static_cast<int>(transmitters_per_map);
  return params;
}

void record_passive(Manifest& m, const PassiveOptions& p) {
  json& j = m.parameters();
  j["kc"] = p.kc;
  j["th"] = p.th;
  j["min_area"] = p.min_area;
  j["connectivity"] = p.connectivity;
  j["ncc"] = p.ncc;
  j["transmissions"] = p.transmissions;
  j["mode"] = p.mode;
}

/// The scenario's emitters when it lists any, otherwise `count` random ones.
std::vector<Emitter> transmissions_for(const ScenarioConfig& cfg, int count, std::uint64_t seed,
                                       std::string_view purpose) {
  if (!cfg.emitters.empty()) return cfg.emitters;
  if (count < 1) throw std::invalid_argument("--transmissions must be >= 1");
  Rng rng(derive_seed(seed, purpose));
  return random_emitters(cfg, static_cast<std::size_t>(count), rng);
}

/// Room, array and scatterers only: the part of a scene a mask depends on.
std::string static_scene_hash(const ScenarioConfig& cfg) {
  ScenarioConfig s;
  s.room = cfg.room;
  s.lis = cfg.lis;
  s.scatterers = cfg.scatterers;
  return scenario_hash(s);
}

fs::path sidecar_path(const fs::path& mask) {
  fs::path p = mask;
  return p.replace_extension(".json");
}

std::string stage_name(const std::string& stem, std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02zu", index);
  return "stage_" + stem + "_" + buf + ".pgm";
}

std::vector<RadioMap> capture_all(const LisSensor& sensor, const ScenarioConfig& scene,
                                  const std::vector<Emitter>& tx, TransmissionMode mode,
                                  std::uint64_t seed, std::string_view purpose) {
  ScenarioConfig snapshot = scene;
  snapshot.emitters.clear();
  return capture_transmissions(sensor, snapshot, tx, mode, derive_seed(seed, purpose));
}

std::size_t per_map(TransmissionMode mode, std::size_t transmissions) {
  return mode == TransmissionMode::sequential ? 1 : transmissions;
}

void dump_snapshot_stages(Manifest& m, const PassiveDetector& detector,
                          const std::vector<RadioMap>& maps) {
  for (std::size_t k = 0; k < maps.size(); ++k) {
    write_pgm(m.output(stage_name("map", k)), map_to_image(maps[k]));
    write_binary_pgm(m.output(stage_name("binary", k)), binarize_kmeans(maps[k]).bits);
    write_binary_pgm(m.output(stage_name("cleaned", k)), detector.clean_snapshot(maps[k]).bits);
  }
}

std::string passive_csv(const std::vector<Component>& detections) {
  std::string text = "label,pixel_x,pixel_y,x_m,y_m,area\n";
  for (const Component& c : detections) {
    text += std::to_string(c.label) + "," + format_double(c.centroid_col) + "," +
            format_double(c.centroid_row) + "," + format_double(c.world.x) + "," +
            format_double(c.world.y) + "," + std::to_string(c.area) + "\n";
  }
  return text;
}

std::string active_csv(const ActiveDetectionResult& result) {
  std::string text = "pixel_x,pixel_y,x_m,y_m,magnitude\n";
  for (const Detection& d : result.detections) {
    text += std::to_string(d.pixel.col) + "," + std::to_string(d.pixel.row) + "," +
            format_double(d.world.x) + "," + format_double(d.world.y) + "," +
            format_double(d.magnitude) + "\n";
  }
  return text;
}

int run_active(const ScenarioConfig& cfg, Manifest& m, const SensingOptions& s,
               const ActiveOptions& a) {
  const std::uint64_t seed = resolve_seed(s, cfg);
  const LisSensor sensor = make_sensor(cfg, s, s.threads);
  m.seed(seed);
  record_sensing(m, cfg, s, sensor.kernel());
  record_active(m, a);
  const RadioMap map = sensor.capture(cfg, derive_seed(seed, "noise"));
  write_magnitude_csv(m.output("map.csv"), map);
  write_pgm(m.output("map.pgm"), map_to_image(map));
  write_text(m.output("detections.csv"), active_csv(detect_active(map, active_params(a))));
  m.write();
  return 0;
}

int run_calibrate(const ScenarioConfig& cfg, Manifest& m, const SensingOptions& s,
                  const PassiveOptions& p, bool dump_stages) {
  if (!cfg.humans.empty()) {
    std::cerr << "calibrate: the calibration scene must not contain humans\n";
    return 2;
  }
  const std::uint64_t seed = resolve_seed(s, cfg);
  const LisSensor sensor = make_sensor(cfg, s, s.threads);
  m.seed(seed);
  record_sensing(m, cfg, s, sensor.kernel());
  record_passive(m, p);

  const TransmissionMode mode = transmission_mode(p.mode);
  const auto tx = transmissions_for(cfg, p.transmissions, seed, "calibration-transmissions");
  const auto maps = capture_all(sensor, cfg, tx, mode, seed, "calibration-noise");
  PassiveDetector detector(cfg.lis, {make_transmitter_template(cfg.lis, sensor.kernel())},
                           passive_params(p, per_map(mode, tx.size())));
  const MaskingMap& mask = detector.calibrate(maps);
  if (dump_stages) dump_snapshot_stages(m, detector, maps);

  write_binary_pgm(m.output("mask.pgm"), mask.bits);
  const json sidecar = {{"source_count", mask.source_count},
                        {"scenario_hash", static_scene_hash(cfg)},
                        {"width", mask.bits.width()},
                        {"height", mask.bits.height()}};
  write_text(m.output("mask.json"), sidecar.dump(2) + "\n");
  m.write();
  return 0;
}

int run_passive(const ScenarioConfig& cfg, const std::string& mask_path, Manifest& m,
                const SensingOptions& s, const PassiveOptions& p, bool dump_stages) {
  if (mask_path.empty() || !fs::exists(mask_path)) {
    std::cerr << "passive: masking map '" << mask_path << "' not found; run calibrate-mask first\n";
    return 2;
  }
  MaskingMap mask;
  mask.bits = read_binary_pgm(mask_path);
  m.input(mask_path);
  const fs::path sidecar = sidecar_path(mask_path);
  if (fs::exists(sidecar)) {
    m.input(sidecar.string());
    const json meta = json::parse(read_text(sidecar));
    mask.source_count = meta.value("source_count", 0);
    if (meta.value("scenario_hash", std::string()) != static_scene_hash(cfg)) {
      std::cerr << "passive: mask was calibrated for a different room, array or scatterer set\n";
      return 2;
    }
  }
  if (mask.bits.width() != static_cast<std::size_t>(cfg.lis.elements_x) ||
      mask.bits.height() != static_cast<std::size_t>(cfg.lis.elements_y)) {
    std::cerr << "passive: mask is " << mask.bits.width() << "x" << mask.bits.height()
              << " but the array is " << cfg.lis.elements_x << "x" << cfg.lis.elements_y << "\n";
    return 2;
  }

  const std::uint64_t seed = resolve_seed(s, cfg);
  const LisSensor sensor = make_sensor(cfg, s, s.threads);
  m.seed(seed);
  record_sensing(m, cfg, s, sensor.kernel());
  record_passive(m, p);

  const TransmissionMode mode = transmission_mode(p.mode);
  const auto tx = transmissions_for(cfg, p.transmissions, seed, "detection-transmissions");
  const auto maps = capture_all(sensor, cfg, tx, mode, seed, "detection-noise");
  PassiveDetector detector(cfg.lis, {make_transmitter_template(cfg.lis, sensor.kernel())},
                           passive_params(p, per_map(mode, tx.size())));
  detector.set_mask(std::move(mask));
  const PassiveResult result = detector.detect(maps);

  if (dump_stages) {
    dump_snapshot_stages(m, detector, maps);
    write_binary_pgm(m.output("stage_combined.pgm"), result.stages.combined.bits);
    write_binary_pgm(m.output("stage_negative.pgm"), result.stages.negative.bits);
    write_binary_pgm(m.output("stage_subtracted.pgm"), result.stages.subtracted.bits);
    write_binary_pgm(m.output("stage_despeckled.pgm"), result.stages.despeckled.bits);
  }
  write_text(m.output("passive.csv"), passive_csv(result.detections));
  m.write();
  return 0;
}

/// Base scene of an evaluation: the given scenario without emitters or humans.
/// Without a scenario file the desk-scale preset is used, minus its scatterers
/// when `keep_scatterers` is false.
ScenarioConfig evaluation_base(const EvalOptions& e, const SensingOptions& s, Manifest& m,
                               bool keep_scatterers = true) {
  ScenarioConfig base = desk_scale_scenario();
  if (!keep_scatterers) base.scatterers.clear();
  if (!e.scenario.empty()) {
    base = load_scenario(e.scenario);
    m.input(e.scenario);
  }
  base.emitters.clear();
  base.humans.clear();
  if (s.snr_db) base.snr_db = *s.snr_db;
  if (s.averaging) base.averaging_count = *s.averaging;
  const auto violations = validate_config(base);
  if (!violations.empty()) throw std::invalid_argument("invalid base scenario: " + violations[0]);
  if (e.trials < 1) throw std::invalid_argument("--trials must be >= 1");
  return base;
}

std::string trial_csv_header() {
  return "trial,seed,truth,detected,matched,misses,false_alarms,detection_rate,mean_error_m\n";
}

std::string trial_csv_row(const TrialReport& r) {
  double mean = 0.0;
  for (double e : r.errors) mean += e;
  if (!r.errors.empty()) mean /= static_cast<double>(r.errors.size());
  return std::to_string(r.trial) + "," + std::to_string(r.seed) + "," +
         std::to_string(r.truth_count) + "," + std::to_string(r.detected_count) + "," +
         std::to_string(r.match.pairs.size()) + "," + std::to_string(r.match.misses.size()) +
         "," + std::to_string(r.match.false_alarms.size()) + "," +
         format_double(r.detection_rate) + "," + (r.errors.empty() ? "" : format_double(mean)) +
         "\n";
}

std::string summary_header() {
  return "trials,mean_detection_rate,mean_detections,mean_error_m,min_error_m,max_error_m,"
         "error_count,p90_error_m\n";
}

std::string summary_row(const std::vector<TrialReport>& reports) {
  const TrialSummary s = summarize(reports);
  const auto errors = pooled_errors(reports);
  const std::string p90 = errors.empty() ? "" : format_double(ecdf_quantile(errors, 0.9));
  return std::to_string(s.trials) + "," + format_double(s.mean_detection_rate) + "," +
         format_double(s.mean_detections) + "," + format_double(s.mean_error) + "," +
         format_double(s.min_error) + "," + format_double(s.max_error) + "," +
         std::to_string(s.error_count) + "," + p90 + "\n";
}

std::string ecdf_csv(const std::vector<double>& errors) {
  std::string text = "error_m,fraction\n";
  for (const EcdfPoint& p : ecdf(errors)) {
    text += format_double(p.value) + "," + format_double(p.fraction) + "\n";
  }
  return text;
}

void record_eval(Manifest& m, const EvalOptions& e, const ScenarioConfig& base,
                 const FilterKernel& kernel, const SensingOptions& s) {
  record_sensing(m, base, s, kernel);
  json& p = m.parameters();
  p["trials"] = e.trials;
  p["gate"] = e.gate;
  p["scenario_hash"] = scenario_hash(base);
}

}  // namespace

int cmd_preset(const std::string& name, const std::string& out) {
  ScenarioConfig cfg;
  if (name == "desk") {
    cfg = desk_scale_scenario();
  } else if (name == "full") {
    cfg = full_scale_scenario();
  } else {
    std::cerr << "preset: unknown preset '" << name << "' (desk, full)\n";
    return 2;
  }
  const std::string text = canonical_scenario(cfg);
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_text(out, text);
  }
  return 0;
}

int cmd_validate(const std::string& scenario, bool canonical) {
  const ScenarioConfig cfg = load_scenario(scenario);
  const auto violations = validate_config(cfg);
  for (const auto& v : violations) std::cerr << scenario << ": " << v << "\n";
  if (!violations.empty()) return 1;
  if (canonical) {
    std::cout << canonical_scenario(cfg);
  } else {
    std::cout << scenario << ": ok (" << scenario_hash(cfg) << ")\n";
  }
  return 0;
}

int cmd_simulate(const std::string& scenario, const std::string& out, const SensingOptions& s) {
  const auto cfg = load_checked(scenario, s);
  if (!cfg) return 1;
  Manifest m("simulate", prepare_dir(out));
  m.input(scenario);
  const std::uint64_t seed = resolve_seed(s, *cfg);
  const LisSensor sensor = make_sensor(*cfg, s, s.threads);
  m.seed(seed);
  record_sensing(m, *cfg, s, sensor.kernel());
  write_signal_csv(m.output("signal.csv"), sensor.receive(*cfg, derive_seed(seed, "noise")));
  m.write();
  return 0;
}

int cmd_map(const std::string& scenario, const std::string& out, const SensingOptions& s) {
  const auto cfg = load_checked(scenario, s);
  if (!cfg) return 1;
  Manifest m("map", prepare_dir(out));
  m.input(scenario);
  const std::uint64_t seed = resolve_seed(s, *cfg);
  const LisSensor sensor = make_sensor(*cfg, s, s.threads);
  m.seed(seed);
  record_sensing(m, *cfg, s, sensor.kernel());
  const RadioMap map = sensor.capture(*cfg, derive_seed(seed, "noise"));
  write_magnitude_csv(m.output("map.csv"), map);
  write_pgm(m.output("map.pgm"), map_to_image(map));
  m.write();
  return 0;
}

int cmd_detect_active(const std::string& map_csv, const std::string& out,
                      const ActiveOptions& a) {
  Manifest m("detect-active", prepare_dir(out));
  m.input(map_csv);
  record_active(m, a);
  const RadioMap map = read_magnitude_csv(map_csv);
  write_text(m.output("detections.csv"), active_csv(detect_active(map, active_params(a))));
  m.write();
  return 0;
}

int cmd_calibrate_mask(const std::string& scenario, const std::string& out,
                       const SensingOptions& s, const PassiveOptions& p, bool dump_stages) {
  const auto cfg = load_checked(scenario, s);
  if (!cfg) return 1;
  Manifest m("calibrate-mask", prepare_dir(out));
  m.input(scenario);
  return run_calibrate(*cfg, m, s, p, dump_stages);
}

int cmd_detect_passive(const std::string& scenario, const std::string& mask,
                       const std::string& out, const SensingOptions& s, const PassiveOptions& p,
                       bool dump_stages) {
  const auto cfg = load_checked(scenario, s);
  if (!cfg) return 1;
  Manifest m("detect-passive", prepare_dir(out));
  m.input(scenario);
  return run_passive(*cfg, mask, m, s, p, dump_stages);
}

int cmd_pipeline(const std::string& scenario, const std::string& mode, const std::string& mask,
                 const std::string& out, const SensingOptions& s, const ActiveOptions& a,
                 const PassiveOptions& p, bool dump_stages) {
  if (mode != "active" && mode != "passive" && mode != "calibrate") {
    std::cerr << "pipeline: unknown mode '" << mode << "' (active, passive, calibrate)\n";
    return 2;
  }
  if (mode == "passive" && (mask.empty() || !fs::exists(mask))) {
    std::cerr << "pipeline: passive mode needs an existing --mask\n";
    return 2;
  }
  const auto cfg = load_checked(scenario, s);
  if (!cfg) return 1;
  Manifest m("pipeline " + mode, prepare_dir(out));
  m.input(scenario);
  if (mode == "active") return run_active(*cfg, m, s, a);
  if (mode == "calibrate") return run_calibrate(*cfg, m, s, p, dump_stages);
  return run_passive(*cfg, mask, m, s, p, dump_stages);
}

int cmd_eval_active(const EvalOptions& e, const std::string& out, const SensingOptions& s,
                    const ActiveOptions& a) {
  Manifest m("eval-active", prepare_dir(out));
  ActiveExperiment exp;
  exp.base = evaluation_base(e, s, m, false);
  exp.users = static_cast<std::size_t>(e.users);
  exp.placement.min_emitter_separation = e.min_separation;
  exp.detection = active_params(a);
  exp.gate = e.gate;
  const std::uint64_t seed = resolve_seed(s, exp.base);
  const LisSensor sensor = make_sensor(exp.base, s, 1);
  m.seed(seed);
  record_eval(m, e, exp.base, sensor.kernel(), s);
  record_active(m, a);
  m.parameters()["users"] = e.users;
  m.parameters()["min_separation"] = e.min_separation;

  const auto reports = run_monte_carlo(
      static_cast<std::size_t>(e.trials), seed, "eval-active", s.threads,
      [&](std::size_t i, std::uint64_t sd) { return run_active_trial(exp, sensor, i, sd); });
  std::string trials = trial_csv_header();
  for (const auto& r : reports) trials += trial_csv_row(r);
  write_text(m.output("trials.csv"), trials);
  write_text(m.output("summary.csv"), summary_header() + summary_row(reports));
  write_text(m.output("ecdf.csv"), ecdf_csv(pooled_errors(reports)));
  m.write();
  return 0;
}

namespace {

PassiveExperiment passive_experiment(const EvalOptions& e, const SensingOptions& s,
                                     const PassiveOptions& p, Manifest& m) {
  PassiveExperiment exp;
  exp.base = evaluation_base(e, s, m);
  exp.calibration_transmissions = static_cast<std::size_t>(e.calibration_transmissions);
  exp.detection_transmissions = static_cast<std::size_t>(p.transmissions);
  exp.humans = static_cast<std::size_t>(e.humans);
  exp.mode = transmission_mode(p.mode);
  exp.detection = passive_params(p, 0);
  exp.gate = e.gate;
  return exp;
}

}  // namespace

int cmd_eval_passive(const EvalOptions& e, const std::string& out, const SensingOptions& s,
                     const PassiveOptions& p) {
  Manifest m("eval-passive", prepare_dir(out));
  const PassiveExperiment exp = passive_experiment(e, s, p, m);
  const std::uint64_t seed = resolve_seed(s, exp.base);
  const LisSensor sensor = make_sensor(exp.base, s, 1);
  const std::vector<TransmitterTemplate> templates{
      make_transmitter_template(exp.base.lis, sensor.kernel())};
  m.seed(seed);
  record_eval(m, e, exp.base, sensor.kernel(), s);
  record_passive(m, p);
  m.parameters()["humans"] = e.humans;
  m.parameters()["calibration_transmissions"] = e.calibration_transmissions;

  const auto reports = run_monte_carlo(
      static_cast<std::size_t>(e.trials), seed, "eval-passive", s.threads,
      [&](std::size_t i, std::uint64_t sd) {
        return run_passive_trial(exp, sensor, templates, i, sd);
      });
  std::string trials = trial_csv_header();
  for (const auto& r : reports) trials += trial_csv_row(r);
  write_text(m.output("trials.csv"), trials);
  write_text(m.output("summary.csv"), summary_header() + summary_row(reports));
  write_text(m.output("ecdf.csv"), ecdf_csv(pooled_errors(reports)));
  m.write();
  return 0;
}

int cmd_eval_separation(const EvalOptions& e, const std::string& out, const SensingOptions& s,
                        const PassiveOptions& p) {
  Manifest m("eval-separation", prepare_dir(out));
  EvalOptions pair = e;
  pair.humans = 2;
  const PassiveExperiment exp = passive_experiment(pair, s, p, m);
  const std::uint64_t seed = resolve_seed(s, exp.base);
  const LisSensor sensor = make_sensor(exp.base, s, 1);
  const std::vector<TransmitterTemplate> templates{
      make_transmitter_template(exp.base.lis, sensor.kernel())};
  m.seed(seed);
  record_eval(m, e, exp.base, sensor.kernel(), s);
  record_passive(m, p);
  m.parameters()["gaps"] = e.gaps;
  m.parameters()["calibration_transmissions"] = e.calibration_transmissions;

  std::string trials = "gap_m," + trial_csv_header();
  std::string summary = "gap_m," + summary_header();
  std::vector<double> all_errors;
  for (double gap : e.gaps) {
    // Same purpose string for every gap: each trial index sees the same draws.
    const auto reports = run_monte_carlo(
        static_cast<std::size_t>(e.trials), seed, "eval-separation", s.threads,
        [&](std::size_t i, std::uint64_t sd) {
          return run_separation_trial(exp, sensor, templates, gap, i, sd);
        });
    for (const auto& r : reports) trials += format_double(gap) + "," + trial_csv_row(r);
    summary += format_double(gap) + "," + summary_row(reports);
    const auto errors = pooled_errors(reports);
    all_errors.insert(all_errors.end(), errors.begin(), errors.end());
  }
  write_text(m.output("trials.csv"), trials);
  write_text(m.output("summary.csv"), summary);
  write_text(m.output("ecdf.csv"), ecdf_csv(all_errors));
  m.write();
  return 0;
}

}  // namespace lisense::cli
