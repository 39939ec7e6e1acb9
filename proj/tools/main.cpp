#include <exception>
#include <functional>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "lisense/scenario_io.hpp"

using namespace lisense::cli;

namespace {

void add_sensing(CLI::App* cmd, SensingOptions& s) {
  cmd->add_option("--seed", s.seed, "Master seed (default: scenario rng_seed)");
  cmd->add_option("--threads", s.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--snr-db", s.snr_db, "Override the scenario SNR gamma in dB");
  cmd->add_option("--avg", s.averaging, "Override the averaging count S")->check(CLI::PositiveNumber);
  cmd->add_option("--depth", s.depth, "Matched-filter design depth d in meters")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--kernel-size", s.kernel_size, "Matched-filter kernel side n")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--wall-echoes", s.wall_echoes, "Add first-order wall image sources");
}

void add_active(CLI::App* cmd, ActiveOptions& a) {
  cmd->add_option("--ka", a.ka, "Peak search half window K_a")->check(CLI::PositiveNumber);
  cmd->add_option("--drop", a.drop, "Drop ratio of the count rule")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--measure", a.measure, "Peak measure compared by the drop rule")
      ->check(CLI::IsMember({"energy", "magnitude"}));
  cmd->add_option("--reference", a.reference, "Peak each candidate is compared with")
      ->check(CLI::IsMember({"previous", "first"}));
}

void add_passive(CLI::App* cmd, PassiveOptions& p) {
  cmd->add_option("--kc", p.kc, "Despeckle tile size K_c")->check(CLI::PositiveNumber);
  cmd->add_option("--th", p.th, "Despeckle black-fraction threshold T_h")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--min-area", p.min_area, "Smallest reported component in pixels");
  cmd->add_option("--connectivity", p.connectivity, "Labeling connectivity")
      ->check(CLI::IsMember({4, 8}));
  cmd->add_option("--ncc", p.ncc, "Template match threshold")->check(CLI::Range(-1.0, 1.0));
  cmd->add_option("--transmissions", p.transmissions,
                  "Random transmissions when the scenario lists no emitters")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tx-mode", p.mode, "One map per transmission or one combined map")
      ->check(CLI::IsMember({"sequential", "simultaneous"}));
}

void add_eval(CLI::App* cmd, EvalOptions& e) {
  cmd->add_option("--scenario", e.scenario,
                  "Base scenario (default: desk-scale preset; eval-active drops its scatterers)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--trials", e.trials, "Monte-Carlo trials")->check(CLI::PositiveNumber);
  cmd->add_option("--gate", e.gate, "Match gate radius in meters")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radio-map sensing with a ceiling-mounted large intelligent surface"};
  app.require_subcommand(1);

  std::string scenario;
  std::string out;
  std::string mask;
  std::string map_csv;
  std::string preset_name;
  std::string pipeline_mode;
  bool canonical = false;
  bool dump_stages = false;
  SensingOptions sensing;
  ActiveOptions active;
  PassiveOptions passive;
  EvalOptions eval;
  std::function<int()> run;

  auto* preset = app.add_subcommand("preset", "Print or write a built-in scenario");
  preset->add_option("name", preset_name, "desk or full")->required();
  preset->add_option("-o,--out", out, "Output file (default: stdout)");
  preset->callback([&] { run = [&] { return cmd_preset(preset_name, out); }; });

  auto* validate = app.add_subcommand("validate", "Check a scenario file");
  validate->add_option("scenario", scenario)->required()->check(CLI::ExistingFile);
  validate->add_flag("--canonical", canonical, "Echo the canonical form");
  validate->callback([&] { run = [&] { return cmd_validate(scenario, canonical); }; });

  auto* simulate = app.add_subcommand("simulate", "Received signal at every element");
  simulate->add_option("scenario", scenario)->required()->check(CLI::ExistingFile);
  simulate->add_option("-o,--out", out, "Output directory")->required();
  add_sensing(simulate, sensing);
  simulate->callback([&] { run = [&] { return cmd_simulate(scenario, out, sensing); }; });

  auto* map = app.add_subcommand("map", "Matched-filter radio map");
  map->add_option("scenario", scenario)->required()->check(CLI::ExistingFile);
  map->add_option("-o,--out", out, "Output directory")->required();
  add_sensing(map, sensing);
  map->callback([&] { run = [&] { return cmd_map(scenario, out, sensing); }; });

  auto* detect_active = app.add_subcommand("detect-active", "Active transmitters in a map");
  detect_active->add_option("--map", map_csv, "Magnitude CSV written by `map`")
      ->required()
      ->check(CLI::ExistingFile);
  detect_active->add_option("-o,--out", out, "Output directory")->required();
  add_active(detect_active, active);
  detect_active->callback([&] { run = [&] { return cmd_detect_active(map_csv, out, active); }; });

  auto* calibrate = app.add_subcommand("calibrate-mask", "Masking map of the empty room");
  calibrate->add_option("scenario", scenario)->required()->check(CLI::ExistingFile);
  calibrate->add_option("-o,--out", out, "Output directory")->required();
  calibrate->add_flag("--dump-stages", dump_stages, "Write per-transmission images");
  add_sensing(calibrate, sensing);
  add_passive(calibrate, passive);
  calibrate->callback([&] {
    run = [&] { return cmd_calibrate_mask(scenario, out, sensing, passive, dump_stages); };
  });

  auto* detect_passive = app.add_subcommand("detect-passive", "Passive humans in a scene");
  detect_passive->add_option("scenario", scenario)->required()->check(CLI::ExistingFile);
  detect_passive->add_option("--mask", mask, "mask.pgm written by calibrate-mask")->required();
  detect_passive->add_option("-o,--out", out, "Output directory")->required();
  detect_passive->add_flag("--dump-stages", dump_stages, "Write intermediate images");
  add_sensing(detect_passive, sensing);
  add_passive(detect_passive, passive);
  detect_passive->callback([&] {
    run = [&] {
      return cmd_detect_passive(scenario, mask, out, sensing, passive, dump_stages);
    };
  });

  auto* pipeline = app.add_subcommand("pipeline", "End-to-end run in one mode");
  pipeline->add_option("scenario", scenario)->required()->check(CLI::ExistingFile);
  pipeline->add_option("--mode", pipeline_mode, "active, passive or calibrate")->required();
  pipeline->add_option("--mask", mask, "Masking map for passive mode");
  pipeline->add_option("-o,--out", out, "Output directory")->required();
  pipeline->add_flag("--dump-stages", dump_stages, "Write intermediate images");
  add_sensing(pipeline, sensing);
  add_active(pipeline, active);
  add_passive(pipeline, passive);
  pipeline->callback([&] {
    run = [&] {
      return cmd_pipeline(scenario, pipeline_mode, mask, out, sensing, active, passive,
                          dump_stages);
    };
  });

  auto* eval_active = app.add_subcommand("eval-active", "Monte-Carlo active localization");
  eval_active->add_option("-o,--out", out, "Output directory")->required();
  eval_active->add_option("--users", eval.users, "Simultaneous users U_a")
      ->check(CLI::PositiveNumber);
  eval_active->add_option("--min-separation", eval.min_separation,
                          "Smallest distance between users in meters");
  add_eval(eval_active, eval);
  add_sensing(eval_active, sensing);
  add_active(eval_active, active);
  eval_active->callback([&] { run = [&] { return cmd_eval_active(eval, out, sensing, active); }; });

  auto* eval_passive = app.add_subcommand("eval-passive", "Monte-Carlo passive detection");
  eval_passive->add_option("-o,--out", out, "Output directory")->required();
  eval_passive->add_option("--humans", eval.humans, "Humans U_p per trial");
  eval_passive->add_option("--calibration-transmissions", eval.calibration_transmissions,
                           "Transmissions used to build the mask")
      ->check(CLI::PositiveNumber);
  add_eval(eval_passive, eval);
  add_sensing(eval_passive, sensing);
  add_passive(eval_passive, passive);
  eval_passive->callback(
      [&] { run = [&] { return cmd_eval_passive(eval, out, sensing, passive); }; });

  auto* eval_separation =
      app.add_subcommand("eval-separation", "Two humans at increasing separation");
  eval_separation->add_option("-o,--out", out, "Output directory")->required();
  eval_separation->add_option("--gaps", eval.gaps, "Edge-to-edge gaps in meters")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.3));
  eval_separation->add_option("--calibration-transmissions", eval.calibration_transmissions,
                              "Transmissions used to build the mask")
      ->check(CLI::PositiveNumber);
  add_eval(eval_separation, eval);
  add_sensing(eval_separation, sensing);
  add_passive(eval_separation, passive);
  eval_separation->callback(
      [&] { run = [&] { return cmd_eval_separation(eval, out, sensing, passive); }; });

  CLI11_PARSE(app, argc, argv);

  try {
    return run();
  } catch (const lisense::ScenarioFormatError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
