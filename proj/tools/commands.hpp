#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lisense::cli {

/// Settings shared by every command that synthesizes radio maps.
struct SensingOptions {
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::optional<double> snr_db;
  std::optional<int> averaging;
  std::optional<double> depth;
  std::optional<int> kernel_size;
  bool wall_echoes = false;
};

struct ActiveOptions {
  int ka = 5;
  double drop = 0.9;
  std::string measure = "energy";
  std::string reference = "previous";
};

struct PassiveOptions {
  int kc = 2;
  double th = 0.5;
  int min_area = 3;
  int connectivity = 8;
  double ncc = 0.6;
  int transmissions = 10;
  std::string mode = "sequential";
};

int cmd_preset(const std::string& name, const std::string& out);
int cmd_validate(const std::string& scenario, bool canonical);
int cmd_simulate(const std::string& scenario, const std::string& out, const SensingOptions& s);
int cmd_map(const std::string& scenario, const std::string& out, const SensingOptions& s);
int cmd_detect_active(const std::string& map_csv, const std::string& out,
                      const ActiveOptions& a);
int cmd_calibrate_mask(const std::string& scenario, const std::string& out,
                       const SensingOptions& s, const PassiveOptions& p, bool dump_stages);
int cmd_detect_passive(const std::string& scenario, const std::string& mask,
                       const std::string& out, const SensingOptions& s, const PassiveOptions& p,
                       bool dump_stages);
int cmd_pipeline(const std::string& scenario, const std::string& mode, const std::string& mask,
                 const std::string& out, const SensingOptions& s, const ActiveOptions& a,
                 const PassiveOptions& p, bool dump_stages);

struct EvalOptions {
  std::string scenario;  // empty: desk-scale preset
  int trials = 20;
  int users = 3;
  double min_separation = 1.0;
  int humans = 4;
  int calibration_transmissions = 10;
  double gate = 0.75;
  std::vector<double> gaps{0.25, 0.5, 0.75, 1.0};
};

int cmd_eval_active(const EvalOptions& e, const std::string& out, const SensingOptions& s,
                    const ActiveOptions& a);
int cmd_eval_passive(const EvalOptions& e, const std::string& out, const SensingOptions& s,
                     const PassiveOptions& p);
int cmd_eval_separation(const EvalOptions& e, const std::string& out, const SensingOptions& s,
                        const PassiveOptions& p);

}  // namespace lisense::cli
