#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "mofw/cost.hpp"
#include "mofw/dac.hpp"
#include "mofw/ltv.hpp"
#include "mofw/meta.hpp"
#include "mofw/transfer.hpp"
#include "mofw/types.hpp"

namespace mofw {

// Derived quantities of the control reduction for a (kappa, gamma)-strongly
// stable gain family on a system with ||B_t|| <= kappa_B and noise bound W:
// the state/control bound, the Lipschitz/gradient/diameter constants of the
// truncated losses, and the pool constants built from them.
struct ControlConstants {
  double kappa = 0.0, gamma = 0.0, kappa_B = 0.0, W = 0.0, G_c = 0.0, beta = 0.0;
  int H = 0, d_u = 0, d_x = 0;

  double tau = 0.0;          // kappa_B kappa^3, the block-radius scale
  double state_bound = 0.0;  // bound on ||x||, ||u||, ||y||, ||v||
  double L_f = 0.0;          // coordinate-wise Lipschitz constant of the truncated loss
  double G_f = 0.0;          // gradient-norm bound of the unary truncated loss
  double D_f = 0.0;          // Frobenius diameter of the decision set
  double zeta = 0.0;         // (H+2)^2 L_f, switching regularizer
  double sigma = 0.0;        // 4 beta state_bound^2
  double phi = 0.0;          // sigma + 2 beta state_bound^2
  double theta = 0.0;        // 8 beta state_bound^2
};

ControlConstants control_constants(double kappa, double gamma, double kappa_B, int H,
                                   int d_u, int d_x, double W, double G_c, double beta);

// N = ceil(log2((2 beta D^2 T + phi) / sigma) / 2) + 1 learners with
// eta_i = 2^{i-1} sqrt(sigma / (zeta T D_f)), clamped and deduplicated at 1.
StepPool control_step_pool(long T, const ControlConstants& k);

// sqrt(2 / ((2 zeta + G_f)(zeta + G_f) D_f^2 T))
double control_meta_rate(const ControlConstants& k, long T);

enum class ControllerKind { meta_ofw, scream, ader, ogd };

const char* controller_name(ControllerKind kind);
std::optional<ControllerKind> controller_from_name(std::string_view name);

// Plant noise as experienced by the closed loop; may depend on the current
// state and control.  Implementations must respect ||w|| <= W.
using NoiseSource = std::function<Vec(long t, const Vec& x, const Vec& u)>;

struct ControlDiagnostics {
  std::vector<double> truncated_gap;   // |c_t(x_t,u_t) - f_t(window)| per step
  double max_y_norm = 0.0;
  double max_v_norm = 0.0;
  double max_block_violation = 0.0;    // max_i ||M[i]||_op - r_i over base decisions
};

struct ControlTrace {
  std::vector<double> step_loss;   // c_t(x_t, u_t), t = 0..T
  std::vector<double> learner_us;  // per-step learner-update time, microseconds
  std::vector<Vec> noises;         // realized w_t
  std::vector<Vec> decisions;      // combined M_t (flat), t = 0..T

  double cumulative_loss = 0.0;
  double switching = 0.0;           // sum ||M_t - M_{t-1}||_F
  double gradient_variation = 0.0;  // sum ||grad_t - grad_{t-1}||_F^2
  double loss_variation = 0.0;      // probe approximation of sum sup |f~_t - f~_{t-1}|
  long lmo_calls = 0;
  long projections = 0;
  long gradient_evals = 0;

  std::optional<ControlDiagnostics> diagnostics;
};

struct ControlRunConfig {
  ControllerKind kind = ControllerKind::meta_ofw;
  long T = 0;
  ControlConstants constants;
  bool collect_diagnostics = false;
  int variation_probes = 64;  // probe count for the loss-variation estimate; 0 disables
};

// Full closed loop: combine the pool decision, act through the
// disturbance-action policy, observe the cost, build the truncated-loss
// gradient, update Hedge weights and base learners, then recover the noise
// from the observed next state.  Only the learner work is timed.
ControlTrace run_controller(const ControlRunConfig& cfg, const LtvSystem& sys,
                            const CostFunction& cost, const MatSchedule& gains,
                            const NoiseSource& noise);

// Cost and path length of the pure linear-feedback trajectory u = -K* x under
// a recorded noise sequence; used as the regret comparator.
struct ComparatorEval {
  double cumulative_cost = 0.0;
  double path_length = 0.0;  // sum_t ||M*_t - M*_{t-1}||_F of the induced DAC blocks
};

ComparatorEval evaluate_gain_comparator(const LtvSystem& sys, const CostFunction& cost,
                                        const MatSchedule& gains,
                                        const MatSchedule& gains_star, int H,
                                        std::span<const Vec> noises, double kappa,
                                        double gamma);

}  // namespace mofw
