#pragma once

#include <span>
#include <vector>

#include "mofw/feasible_set.hpp"
#include "mofw/learners.hpp"
#include "mofw/loss.hpp"
#include "mofw/types.hpp"

namespace mofw {

// Geometrically doubling step sizes eta_{i+1} = 2 eta_i, each in (0, 1]; a
// value that clamps to 1 is kept once and further doublings are dropped.
struct StepPool {
  std::vector<double> etas;
  int size() const { return static_cast<int>(etas.size()); }
};

StepPool geometric_step_pool(int max_learners, double eta_base);

// Pool sized for an unknown loss variation: alpha = 2(a+c),
// N = ceil(log2(1 + T c / alpha) / 2) + 1, eta_1 = sqrt(alpha / (lambda T D)).
StepPool build_step_pool(long T, double a, double c, double lambda, double D);

// p_i = (N+1) / (N i (i+1)); the last entry absorbs rounding so the weights
// sum to exactly one.
Eigen::VectorXd init_weights(int N);

// Hedge rate sqrt(2 / ((2 lambda + G)(lambda + G) D^2 T)).
double meta_rate(double lambda, double G, double D, long T);

// g_t(x) = <grad_at_combined, x>
double linearized_loss(const Vec& grad_at_combined, const Vec& x);

// l_i = g_t(x_i) + lambda ||x_i - prev_i||
Eigen::VectorXd surrogate_losses(const Vec& grad, std::span<const Vec> base_xs,
                                 std::span<const Vec> prev_xs, double lambda);

// Multiplicative-weights update p_i <- p_i exp(-eps l_i) / Z; losses are
// shifted by their minimum before exponentiation, which normalization
// cancels exactly.
Eigen::VectorXd hedge_update(const Eigen::VectorXd& p, const Eigen::VectorXd& losses,
                             double epsilon);

// x = sum_i p_i x_i
Vec combine(const Eigen::VectorXd& p, std::span<const Vec> base_xs);

// State shared by the Frank-Wolfe pool and the projected-gradient baselines:
// N base decisions, their previous values (for the switching term), and the
// Hedge weights.
struct MetaOfwState {
  StepPool pool;
  std::vector<Vec> base_x;
  std::vector<Vec> prev_base_x;
  Eigen::VectorXd p;
  double epsilon = 0.0;
  double lambda = 0.0;
};

MetaOfwState make_meta_state(const FeasibleSet& set, StepPool pool, double epsilon,
                             double lambda);

struct RoundResult {
  Vec decision;
  double incurred_loss;
};

// One round: emit the weighted decision, suffer the memory loss on `window`
// (which receives the new decision), evaluate the unary gradient once, update
// the Hedge weights on the switching-cost-regularized surrogate, and advance
// every base learner on the shared gradient.
RoundResult meta_ofw_round(MetaOfwState& state, const FeasibleSet& set,
                           const LossOracle& oracle, long t, RollingWindow& window);

// Same skeleton with projected-gradient base learners; the surrogate keeps
// the switching term (lambda from the state).
RoundResult scream_round(MetaOfwState& state, const FeasibleSet& set,
                         const LossOracle& oracle, long t, RollingWindow& window);

// Projected-gradient pool without switching regularization (state.lambda is
// ignored, the surrogate uses lambda = 0).
RoundResult ader_round(MetaOfwState& state, const FeasibleSet& set, const LossOracle& oracle,
                       long t, RollingWindow& window);

}  // namespace mofw
