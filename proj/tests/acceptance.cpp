// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "lisense/active.hpp"
#include "lisense/channel.hpp"
#include "lisense/evaluation.hpp"
#include "lisense/io.hpp"
#include "lisense/passive.hpp"
#include "lisense/radiomap.hpp"
#include "lisense/scenario_io.hpp"
#include "lisense/sensor.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace lisense;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* format, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, format, a);
  return buf;
}

unsigned worker_threads() { return std::max(2u, std::thread::hardware_concurrency()); }

ScenarioConfig desk_without_emitters() {
  ScenarioConfig cfg = desk_scale_scenario();
  cfg.emitters.clear();
  return cfg;
}

// 1. Noiseless single-emitter localization.
Outcome noiseless_localization() {
  const auto t0 = Clock::now();
  ScenarioConfig cfg = desk_without_emitters();
  cfg.scatterers.clear();
  cfg.noiseless = true;
  const LisSensor sensor(cfg, LisSensor::default_kernel(cfg));
  Rng rng(derive_seed(1, "acceptance-noiseless"));
  PlacementRules rules;
  int hits = 0;
  int worst = 0;
  for (int i = 0; i < 100; ++i) {
    ScenarioConfig snap = cfg;
    snap.emitters = random_emitters(cfg, 1, rng, rules);
    const RadioMap map = sensor.capture(snap, 0);
    const auto it = std::max_element(map.magnitudes.begin(), map.magnitudes.end());
    const auto idx = static_cast<std::size_t>(it - map.magnitudes.begin());
    const Pixel got{static_cast<int>(idx % map.magnitudes.width()),
                    static_cast<int>(idx / map.magnitudes.width())};
    const Pixel want = world_to_pixel(
        {snap.emitters[0].position.x, snap.emitters[0].position.y}, cfg.lis);
    const int dist = std::max(std::abs(got.col - want.col), std::abs(got.row - want.row));
    worst = std::max(worst, dist);
    hits += dist <= 1 ? 1 : 0;
  }
  const double t = seconds_since(t0);
  return {hits == 100 && t < 10.0,
          std::to_string(hits) + "/100 within 1 px (worst " + std::to_string(worst) +
              " px), " + fmt("%.1f s", t)};
}

std::vector<TrialReport> active_trials(double snr_db) {
  ActiveExperiment exp;
  exp.base = desk_without_emitters();
  // Active experiments are run in a room without metallic scatterers.
  exp.base.scatterers.clear();
  exp.base.snr_db = snr_db;
  exp.users = 3;
  exp.placement.min_emitter_separation = 1.0;
  const LisSensor sensor(exp.base, LisSensor::default_kernel(exp.base));
  return run_monte_carlo(100, 2024, "acceptance-active", worker_threads(),
                         [&](std::size_t i, std::uint64_t s) {
                           return run_active_trial(exp, sensor, i, s);
                         });
}

// 2 and 3 share the gamma = 0 dB trials.
Outcome active_ecdf(const std::vector<TrialReport>& at0, double t0_seconds) {
  const auto t0 = Clock::now();
  const auto at10 = active_trials(10.0);
  const double elapsed = t0_seconds + seconds_since(t0);
  const double ds = desk_scale_scenario().lis.spacing;
  const auto e0 = pooled_errors(at0);
  const auto e10 = pooled_errors(at10);
  if (e0.empty() || e10.empty()) return {false, "no matched detections"};
  const double p0 = ecdf_quantile(e0, 0.9);
  const double p10 = ecdf_quantile(e10, 0.9);
  const bool pass = p0 <= 3.0 * ds && std::abs(p0 - p10) < ds && elapsed < 300.0;
  return {pass, fmt("p90 %.4f m at 0 dB", p0) + fmt(", %.4f m at 10 dB", p10) +
                    fmt(" (limit %.4f m)", 3.0 * ds) + fmt(", %.1f s", elapsed)};
}

Outcome active_count(const std::vector<TrialReport>& at0) {
  int correct = 0;
  for (const TrialReport& r : at0) correct += r.detected_count == r.truth_count ? 1 : 0;
  return {correct >= 95, std::to_string(correct) + "/100 trials with the true user count"};
}

PassiveExperiment passive_experiment() {
  PassiveExperiment exp;
  exp.base = desk_without_emitters();
  exp.base.snr_db = 0.0;
  exp.base.averaging_count = 100;
  exp.calibration_transmissions = 10;
  exp.detection_transmissions = 10;
  return exp;
}

// 4. Passive detection.
Outcome passive_detection() {
  const auto t0 = Clock::now();
  PassiveExperiment exp = passive_experiment();
  exp.humans = 4;
  const LisSensor sensor(exp.base, LisSensor::default_kernel(exp.base));
  const std::vector<TransmitterTemplate> templates = {
      make_transmitter_template(exp.base.lis, sensor.kernel())};
  const auto reports = run_monte_carlo(20, 2024, "acceptance-passive", worker_threads(),
                                       [&](std::size_t i, std::uint64_t s) {
                                         return run_passive_trial(exp, sensor, templates, i, s);
                                       });
  const TrialSummary s = summarize(reports);
  const double t = seconds_since(t0);
  const bool pass = s.mean_detection_rate >= 0.7 && s.error_count > 0 && s.mean_error <= 0.5 &&
                    t < 900.0;
  return {pass, fmt("rate %.3f", s.mean_detection_rate) + fmt(", mean error %.3f m", s.mean_error) +
                    fmt(", %.1f s", t)};
}

// 5. Separation sweep.
Outcome separation_sweep() {
  const auto t0 = Clock::now();
  PassiveExperiment exp = passive_experiment();
  const LisSensor sensor(exp.base, LisSensor::default_kernel(exp.base));
  const std::vector<TransmitterTemplate> templates = {
      make_transmitter_template(exp.base.lis, sensor.kernel())};
  const double gaps[] = {0.25, 0.5, 0.75, 1.0};
  std::vector<double> means;
  std::string detail;
  for (double gap : gaps) {
    const auto reports = run_monte_carlo(
        20, 2024, "acceptance-separation", worker_threads(),
        [&](std::size_t i, std::uint64_t s) {
          return run_separation_trial(exp, sensor, templates, gap, i, s);
        });
    means.push_back(summarize(reports).mean_detections);
    detail += fmt("%.2f m: ", gap) + fmt("%.2f  ", means.back());
  }
  bool monotone = true;
  for (std::size_t i = 1; i < means.size(); ++i) monotone = monotone && means[i] >= means[i - 1];
  const bool pass = monotone && means.front() >= 1.2 && means.back() >= 1.5;
  return {pass, detail + (monotone ? "monotone" : "not monotone") + fmt(", %.1f s", seconds_since(t0))};
}

// 6. FFT correlation against the textbook sum.
Outcome convolution_oracle() {
  const auto t0 = Clock::now();
  Rng rng(derive_seed(1, "acceptance-convolution"));
  std::uniform_int_distribution<int> grid_side(16, 64);
  std::uniform_int_distribution<int> kernel_side(1, 15);
  std::normal_distribution<double> n(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    ComplexGrid y(grid_side(rng), grid_side(rng));
    for (cplx& v : y) v = {n(rng), n(rng)};
    FilterKernel k;
    k.grid = ComplexGrid(kernel_side(rng), kernel_side(rng));
    for (cplx& v : k.grid) v = {n(rng), n(rng)};
    const ComplexGrid want = oracle::direct_correlation(y, k.grid);
    const RadioMap got = apply_filter(y, k);
    double peak = 0.0;
    double err = 0.0;
    for (std::size_t j = 0; j < want.size(); ++j) {
      peak = std::max(peak, std::abs(want[j]));
      err = std::max(err, std::abs(want[j] - got.complex_map[j]));
    }
    worst = std::max(worst, err / peak);
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-9 && t < 30.0, fmt("max relative error %.2e", worst) + fmt(", %.2f s", t)};
}

// 7. Labeling against flood fill.
Outcome labeling_oracle() {
  const auto t0 = Clock::now();
  Rng rng(derive_seed(1, "acceptance-labeling"));
  std::uniform_real_distribution<double> density(0.2, 0.7);
  int identical = 0;
  for (int i = 0; i < 200; ++i) {
    std::bernoulli_distribution black(density(rng));
    ByteGrid bits(16, 16);
    for (auto& b : bits) b = black(rng) ? 0 : 1;
    bool same = true;
    for (bool eight : {false, true}) {
      const auto want = oracle::flood_components(bits, eight);
      const LabeledComponents got = label_components(
          {bits, Polarity::negative}, eight ? Connectivity::eight : Connectivity::four);
      same = same && got.component_count == static_cast<int>(want.size());
      for (std::size_t k = 0; same && k < want.size(); ++k) {
        same = got.components[k].area == static_cast<int>(want[k].size());
        for (const Pixel& p : want[k]) same = same && got.labels(p.col, p.row) == int(k) + 1;
      }
    }
    identical += same ? 1 : 0;
  }
  const double t = seconds_since(t0);
  return {identical == 200 && t < 5.0,
          std::to_string(identical) + "/200 maps identical, " + fmt("%.2f s", t)};
}

// 8. k-means against the exhaustive split.
Outcome kmeans_oracle() {
  const auto t0 = Clock::now();
  Rng rng(derive_seed(1, "acceptance-kmeans"));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int identical = 0;
  for (int i = 0; i < 50; ++i) {
    const double sigma = 0.05 + 0.2 * u(rng);
    const double low_mean = 2.0 * u(rng);
    const double high_mean = low_mean + sigma * (6.0 + 4.0 * u(rng));
    const double share = 0.1 + 0.6 * u(rng);
    std::normal_distribution<double> low(low_mean, sigma);
    std::normal_distribution<double> high(high_mean, sigma);
    std::bernoulli_distribution upper(share);
    RealGrid g(32, 32);
    for (double& v : g) v = upper(rng) ? high(rng) : low(rng);
    const double cut = oracle::optimal_split_threshold(g);
    const BinaryMap bin = binarize_kmeans(g);
    bool same = true;
    for (std::size_t j = 0; j < g.size(); ++j) same = same && bin.bits[j] == (g[j] >= cut ? 1 : 0);
    identical += same ? 1 : 0;
  }
  const double t = seconds_since(t0);
  return {identical == 50 && t < 10.0,
          std::to_string(identical) + "/50 maps identical, " + fmt("%.2f s", t)};
}

// 9. Noise calibration and S-averaging.
Outcome noise_calibration() {
  // 317 x 317 elements give 100489 samples.
  ScenarioConfig cfg;
  cfg.lis.elements_x = 317;
  cfg.lis.elements_y = 317;
  cfg.lis.carrier_frequency = 3.5e9;
  cfg.lis.spacing = half_wavelength(cfg.lis.carrier_frequency);
  cfg.room = {14.0, 14.0, 4.0};
  center_array(cfg.lis, cfg.room);
  cfg.emitters.push_back({{6.3, 7.4, kEmitterHeight}, 20.0, 0.4});
  cfg.scatterers.push_back({{4.0, 9.0}});
  const ComplexGrid field = superpose(cfg);
  const double lambda = cfg.lis.wavelength();
  const double scale = antenna_scale(lambda);

  const auto noise_power = [&](const NoiseSpec& spec) {
    const ComplexGrid y = element_signal(field, spec, lambda);
    double p = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) p += std::norm(y[i] - scale * field[i]);
    return p / static_cast<double>(y.size());
  };
  double signal = 0.0;
  for (const cplx& v : field) signal += std::norm(scale * v);
  signal /= static_cast<double>(field.size());

  bool pass = true;
  std::string detail;
  for (double g : {-10.0, 0.0, 10.0, 20.0}) {
    NoiseSpec spec;
    spec.snr_db = g;
    spec.rng_seed = derive_seed(1, "acceptance-noise", static_cast<std::uint64_t>(g + 100));
    const double got = 10.0 * std::log10(signal / noise_power(spec));
    pass = pass && std::abs(got - g) <= 0.1;
    detail += fmt("%+.0f dB -> ", g) + fmt("%+.3f dB; ", got);
  }
  NoiseSpec single;
  single.rng_seed = derive_seed(1, "acceptance-noise-s1");
  const double p1 = noise_power(single);
  for (int s : {10, 100}) {
    NoiseSpec avg = single;
    avg.averaging_count = s;
    avg.rng_seed = derive_seed(1, "acceptance-noise-s", static_cast<std::uint64_t>(s));
    const double ratio = p1 / noise_power(avg);
    pass = pass && std::abs(ratio / s - 1.0) <= 0.05;
    detail += "S=" + std::to_string(s) + fmt(" -> %.2f; ", ratio);
  }
  return {pass, detail};
}

// 10. CLI determinism.
struct CliRun {
  std::string name;
  std::function<std::string(const fs::path& out, unsigned threads)> args;
  bool output_is_file = false;
};

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

Outcome cli_determinism(const fs::path& cli, const fs::path& work) {
  const auto t0 = Clock::now();
  fs::remove_all(work);
  fs::create_directories(work);

  const fs::path desk = work / "desk.json";
  const fs::path empty = work / "empty.json";
  const fs::path occupied = work / "occupied.json";
  ScenarioConfig cfg = desk_scale_scenario();
  write_text(desk, canonical_scenario(cfg));
  cfg.emitters.clear();
  cfg.averaging_count = 10;
  write_text(empty, canonical_scenario(cfg));
  cfg.humans = {Human{{2.0, 3.0}}, Human{{3.6, 3.3}}};
  write_text(occupied, canonical_scenario(cfg));

  const auto run = [&](const std::string& args) {
    const std::string cmd = quote(cli) + " " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str()) == 0;
  };
  const fs::path ref = work / "reference";
  if (!run("map " + quote(desk) + " -o " + quote(ref / "map")) ||
      !run("calibrate-mask " + quote(empty) + " -o " + quote(ref / "mask") +
           " --transmissions 3")) {
    return {false, "reference runs failed"};
  }

  const std::string passive = " --transmissions 3";
  const std::vector<CliRun> runs = {
      {"preset", [&](const fs::path& o, unsigned) { return "preset desk -o " + quote(o); }, true},
      {"validate",
       [&](const fs::path& o, unsigned) {
         return "validate --canonical " + quote(desk) + " > " + quote(o);
       },
       true},
      {"simulate",
       [&](const fs::path& o, unsigned t) {
         return "simulate " + quote(desk) + " -o " + quote(o) + " --threads " + std::to_string(t);
       }},
      {"map",
       [&](const fs::path& o, unsigned t) {
         return "map " + quote(desk) + " -o " + quote(o) + " --threads " + std::to_string(t);
       }},
      {"detect-active",
       [&](const fs::path& o, unsigned) {
         return "detect-active --map " + quote(ref / "map" / "map.csv") + " -o " + quote(o);
       }},
      {"calibrate-mask",
       [&](const fs::path& o, unsigned t) {
         return "calibrate-mask " + quote(empty) + " -o " + quote(o) + passive +
                " --dump-stages --threads " + std::to_string(t);
       }},
      {"detect-passive",
       [&](const fs::path& o, unsigned t) {
         return "detect-passive " + quote(occupied) + " --mask " +
                quote(ref / "mask" / "mask.pgm") + " -o " + quote(o) + passive +
                " --dump-stages --threads " + std::to_string(t);
       }},
      {"pipeline",
       [&](const fs::path& o, unsigned t) {
         return "pipeline " + quote(desk) + " --mode active -o " + quote(o) + " --threads " +
                std::to_string(t);
       }},
      {"eval-active",
       [&](const fs::path& o, unsigned t) {
         return "eval-active -o " + quote(o) + " --trials 3 --seed 5 --threads " +
                std::to_string(t);
       }},
      {"eval-passive",
       [&](const fs::path& o, unsigned t) {
         return "eval-passive -o " + quote(o) +
                " --trials 2 --humans 2 --calibration-transmissions 3 --avg 10 --seed 5" +
                passive + " --threads " + std::to_string(t);
       }},
      {"eval-separation",
       [&](const fs::path& o, unsigned t) {
         return "eval-separation -o " + quote(o) +
                " --trials 2 --gaps 0.25,1.0 --calibration-transmissions 3 --avg 10 --seed 5" +
                passive + " --threads " + std::to_string(t);
       }},
  };

  const auto collect = [](const fs::path& out, bool is_file) {
    std::vector<std::pair<std::string, std::string>> files;
    if (is_file) {
      files.emplace_back(out.filename().string(), read_text(out));
      return files;
    }
    for (const auto& entry : fs::recursive_directory_iterator(out)) {
      if (entry.is_regular_file()) {
        files.emplace_back(fs::relative(entry.path(), out).string(), read_text(entry.path()));
      }
    }
    std::sort(files.begin(), files.end());
    return files;
  };

  std::vector<std::string> failures;
  const unsigned many = worker_threads();
  for (const CliRun& r : runs) {
    std::vector<std::vector<std::pair<std::string, std::string>>> outputs;
    bool ok = true;
    int k = 0;
    fs::create_directories(work / r.name);
    for (unsigned threads : {1u, many}) {
      for (int rep = 0; rep < 2; ++rep) {
        const fs::path o = work / r.name / ("run" + std::to_string(k++) + (r.output_is_file ? ".json" : ""));
        ok = ok && run(r.args(o, threads));
        if (ok) outputs.push_back(collect(o, r.output_is_file));
      }
    }
    for (auto& files : outputs) {
      if (r.output_is_file) files.front().first.clear();
    }
    bool same = ok && !outputs.front().empty();
    for (std::size_t i = 1; same && i < outputs.size(); ++i) same = outputs[i] == outputs[0];
    if (!same) failures.push_back(r.name);
  }
  std::string detail = std::to_string(runs.size() - failures.size()) + "/" +
                       std::to_string(runs.size()) + " commands byte-identical";
  for (const auto& f : failures) detail += " [differs: " + f + "]";
  return {failures.empty(), detail + fmt(", %.1f s", seconds_since(t0))};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string cli;
  std::string work = "acceptance_work";
  std::vector<int> only;
  app.add_option("--cli", cli, "Path to the lisense executable")->required();
  app.add_option("--work", work, "Scratch directory");
  app.add_option("--only", only, "Run only these criteria");
  CLI11_PARSE(app, argc, argv);

  const auto wanted = [&](int id) {
    return only.empty() || std::find(only.begin(), only.end(), id) != only.end();
  };
  int failed = 0;
  const auto report = [&](int id, const char* title, const Outcome& o) {
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << id << " (" << title
              << "): " << o.detail << std::endl;
    failed += o.pass ? 0 : 1;
  };

  if (wanted(1)) report(1, "noiseless localization", noiseless_localization());
  if (wanted(2) || wanted(3)) {
    const auto t0 = Clock::now();
    const auto at0 = active_trials(0.0);
    const double t = seconds_since(t0);
    if (wanted(2)) report(2, "active ECDF", active_ecdf(at0, t));
    if (wanted(3)) report(3, "active count", active_count(at0));
  }
  if (wanted(4)) report(4, "passive detection", passive_detection());
  if (wanted(5)) report(5, "separation sweep", separation_sweep());
  if (wanted(6)) report(6, "convolution oracle", convolution_oracle());
  if (wanted(7)) report(7, "labeling oracle", labeling_oracle());
  if (wanted(8)) report(8, "k-means oracle", kmeans_oracle());
  if (wanted(9)) report(9, "noise calibration", noise_calibration());
  if (wanted(10)) report(10, "CLI determinism", cli_determinism(cli, work));
  return failed == 0 ? 0 : 1;
}
