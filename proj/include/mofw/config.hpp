#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mofw/control.hpp"
#include "mofw/noise.hpp"
#include "mofw/schedule.hpp"

namespace mofw {

// Sectioned key-value text:
//   [section]
//   key = value      # trailing comments allowed
// Unknown keys are rejected by the experiment loader, not here.
class ConfigFile {
 public:
  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_string(const std::string& text);

  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  long get_long(const std::string& section, const std::string& key, long fallback) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;

  const std::map<std::string, std::map<std::string, std::string>>& sections() const {
    return sections_;
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

struct ExperimentConfig {
  std::vector<ControllerKind> algorithms = {ControllerKind::meta_ofw, ControllerKind::scream,
                                            ControllerKind::ader, ControllerKind::ogd};
  int d_x = 2;
  int d_u = 1;
  long T = 2000;
  int H = 5;
  int trials = 10;
  std::uint64_t seed = 1;
  std::string out = "results.csv";

  NoiseSpec noise;
  WeightSchedule schedule;

  // bench plant: diagonal A with an actuated block of radius
  // `open_loop_radius` cancelled by the gain to `closed_loop_radius`, and an
  // unactuated block of radius `free_radius` (must already contract).
  double open_loop_radius = 1.05;
  double free_radius = 0.5;
  double closed_loop_radius = 0.5;
  double input_gain = 1.0;  // diagonal magnitude of B
};

ExperimentConfig load_experiment_config(const ConfigFile& file);

// Parsed, validated, ready-to-run instantiation of a config.
struct BenchInstance {
  LtvSystem sys;
  MatSchedule gains;
  ControlConstants constants;
  std::shared_ptr<CostFunction> cost;
  double kappa;
  double gamma;
};

BenchInstance make_bench_instance(const ExperimentConfig& cfg);

}  // namespace mofw
