#pragma once

#include <string>
#include <vector>

#include "mofw/config.hpp"

namespace mofw {

struct TrialResult {
  std::string algorithm;
  std::uint64_t seed = 0;
  int d_x = 0;
  int d_u = 0;
  long T = 0;
  int H = 0;
  std::string noise;
  std::string schedule;

  double cum_loss = 0.0;
  double regret = 0.0;       // against the pure linear-feedback trajectory
  double vt = 0.0;
  double dt = 0.0;
  double ct = 0.0;
  double switch_cost = 0.0;
  double wall_ms = 0.0;      // whole-cell wall time
  double per_step_us = 0.0;  // mean learner-update time per step

  std::vector<double> step_loss;  // length T+1
  double clip_rate = 0.0;

  std::string error;  // nonempty when the cell failed; numeric fields then unset
  bool failed() const { return !error.empty(); }
};

// Runs every (algorithm x trial) cell on a worker pool; per-cell failures are
// captured in the result instead of aborting sibling cells.  Cell seeds
// derive from (master seed, cell index), so results do not depend on
// scheduling order.
std::vector<TrialResult> run_experiment(const ExperimentConfig& cfg);

// CSV with one row per successful trial:
// algorithm,seed,dx,du,T,H,noise,schedule,cum_loss,regret,VT,DT,CT,switch_cost,wall_ms,per_step_us
void write_csv(const std::vector<TrialResult>& results, const std::string& path);
std::string results_to_csv(const std::vector<TrialResult>& results);

// Per-algorithm medians plus the meta_ofw/scream per-step timing ratio.
std::string summarize(const std::vector<TrialResult>& results);

}  // namespace mofw
