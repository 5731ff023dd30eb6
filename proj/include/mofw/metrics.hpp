#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mofw/feasible_set.hpp"
#include "mofw/loss.hpp"
#include "mofw/types.hpp"

namespace mofw {

// Non-stationarity and regret accumulators for one run:
//   loss variation     V_T = sum_t sup_x |f~_t(x) - f~_{t-1}(x)|
//   gradient variation D_T = sum_t ||grad_t(x_t) - grad_{t-1}(x_{t-1})||^2
//   path length        C_T = sum_t ||v_t - v_{t-1}||
//   switching cost           sum_t ||x_t - x_{t-1}||
// plus cumulative memory losses of the learner and of the comparator.
// The first update establishes the previous-round cache and contributes
// nothing to the difference-based accumulators.
class MetricTracker {
 public:
  double learner_loss() const { return learner_loss_; }
  double comparator_loss() const { return comparator_loss_; }
  double regret() const { return learner_loss_ - comparator_loss_; }
  double loss_variation() const { return vt_; }
  double gradient_variation() const { return dt_; }
  double path_length() const { return ct_; }
  double switching_cost() const { return switch_; }

  // `learner_window` and `comparator_window` hold the last m+1 decisions
  // (zero padded before round m), newest last.  `grad` is the unary gradient
  // at the newest learner decision.  `variation_probe` approximates the sup
  // in V_T when the oracle has no exact expression for it.
  void update(long t, std::span<const Vec> learner_window,
              std::span<const Vec> comparator_window, const LossOracle& oracle,
              const Vec& grad, std::span<const Vec> variation_probe);

 private:
  double learner_loss_ = 0.0;
  double comparator_loss_ = 0.0;
  double vt_ = 0.0;
  double dt_ = 0.0;
  double ct_ = 0.0;
  double switch_ = 0.0;
  std::optional<Vec> prev_grad_;
  std::optional<Vec> prev_x_;
  std::optional<Vec> prev_v_;
  std::optional<long> prev_t_;
};

// Deterministic probe points for approximating sup_x over the set: all
// vertices when the set has few (box up to 64 corners, simplex), otherwise
// 64 Halton points projected onto the set.
std::vector<Vec> variation_probes(const FeasibleSet& set);

}  // namespace mofw
