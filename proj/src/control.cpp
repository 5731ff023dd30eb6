#include "mofw/control.hpp"

#include <Eigen/SVD>

#include <chrono>
#include <cmath>

#include "mofw/instrumentation.hpp"
#include "mofw/metrics.hpp"

namespace mofw {

ControlConstants control_constants(double kappa, double gamma, double kappa_B, int H,
                                   int d_u, int d_x, double W, double G_c, double beta) {
  if (!(kappa >= 1.0)) throw std::invalid_argument("control_constants: kappa must be >= 1");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("control_constants: gamma must lie in (0, 1)");
  if (!(kappa_B > 0.0) || !(W > 0.0) || !(G_c > 0.0) || !(beta > 0.0))
    throw std::invalid_argument("control_constants: bounds must be positive");
  if (H < 1 || d_u < 1 || d_x < 1)
    throw std::invalid_argument("control_constants: H and dimensions must be positive");

  const double contraction = kappa * kappa * std::pow(1.0 - gamma, H + 1);
  if (!(contraction < 1.0))
    throw std::invalid_argument(
        "control_constants: kappa^2 (1-gamma)^{H+1} must be below one; "
        "increase H or gamma");

  ControlConstants k;
  k.kappa = kappa;
  k.gamma = gamma;
  k.kappa_B = kappa_B;
  k.W = W;
  k.G_c = G_c;
  k.beta = beta;
  k.H = H;
  k.d_u = d_u;
  k.d_x = d_x;

  const double kappa3 = kappa * kappa * kappa;
  k.tau = kappa_B * kappa3;
  k.state_bound =
      W * kappa3 * (1.0 + H * kappa_B * k.tau) / (gamma * (1.0 - contraction)) +
      W * k.tau / gamma;

  const int d = std::min(d_u, d_x);
  k.L_f = 3.0 * G_c * k.state_bound * std::sqrt(static_cast<double>(H)) * kappa_B * kappa3 * W;
  k.G_f = 3.0 * H * d * d * G_c * W * kappa_B * kappa3 / gamma;
  k.D_f = 2.0 * std::sqrt(static_cast<double>(d)) * kappa_B * kappa3 / gamma;
  k.zeta = (H + 2.0) * (H + 2.0) * k.L_f;
  const double db2 = k.state_bound * k.state_bound;
  k.sigma = 4.0 * beta * db2;
  k.phi = k.sigma + 2.0 * beta * db2;
  k.theta = 8.0 * beta * db2;
  return k;
}

StepPool control_step_pool(long T, const ControlConstants& k) {
  if (T < 1) throw std::invalid_argument("control_step_pool: T must be positive");
  const double arg = (2.0 * k.beta * k.state_bound * k.state_bound * T + k.phi) / k.sigma;
  const int n = std::max(1, static_cast<int>(std::ceil(0.5 * std::log2(arg)) + 1.0));
  const double eta_base = std::sqrt(k.sigma / (k.zeta * static_cast<double>(T) * k.D_f));
  return geometric_step_pool(n, eta_base);
}

double control_meta_rate(const ControlConstants& k, long T) {
  if (T < 1) throw std::invalid_argument("control_meta_rate: T must be positive");
  return std::sqrt(2.0 / ((2.0 * k.zeta + k.G_f) * (k.zeta + k.G_f) * k.D_f * k.D_f *
                          static_cast<double>(T)));
}

const char* controller_name(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::meta_ofw: return "meta_ofw";
    case ControllerKind::scream: return "scream";
    case ControllerKind::ader: return "ader";
    case ControllerKind::ogd: return "ogd";
  }
  return "unknown";
}

std::optional<ControllerKind> controller_from_name(std::string_view name) {
  if (name == "meta_ofw") return ControllerKind::meta_ofw;
  if (name == "scream") return ControllerKind::scream;
  if (name == "ader") return ControllerKind::ader;
  if (name == "ogd") return ControllerKind::ogd;
  return std::nullopt;
}

namespace {

double op_norm(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues().size() == 0 ? 0.0 : svd.singularValues()(0);
}

}  // namespace

ControlTrace run_controller(const ControlRunConfig& cfg, const LtvSystem& sys,
                            const CostFunction& cost, const MatSchedule& gains,
                            const NoiseSource& noise) {
  const ControlConstants& k = cfg.constants;
  const long T = cfg.T;
  if (T < 0) throw std::invalid_argument("run_controller: T must be nonnegative");
  if (sys.horizon < T) throw std::invalid_argument("run_controller: system horizon too short");
  const int d_x = sys.d_x();
  const int d_u = sys.d_u();
  if (k.d_x != d_x || k.d_u != d_u)
    throw std::invalid_argument("run_controller: constants do not match the system");
  const int H = k.H;
  const BlockShape shape{H, d_u, d_x};

  const FeasibleSet m_space = dac_constraint_set(H, d_u, d_x, k.kappa_B, k.kappa, k.gamma);
  const Vec m_zero = initial_point(m_space);

  // learner state: either a Hedge pool or a single projected-gradient learner
  const bool pooled = cfg.kind != ControllerKind::ogd;
  MetaOfwState pool_state;
  Vec single_m = m_zero;
  double single_eta = 0.0;
  double surrogate_lambda = 0.0;
  if (pooled) {
    const StepPool pool = control_step_pool(T + 1, k);
    double eps = 0.0;
    if (cfg.kind == ControllerKind::ader) {
      surrogate_lambda = 0.0;
      eps = meta_rate(0.0, k.G_f, k.D_f, T + 1);
    } else {
      surrogate_lambda = k.zeta;
      eps = control_meta_rate(k, T + 1);
    }
    pool_state = make_meta_state(m_space, pool, eps, surrogate_lambda);
  } else {
    single_eta = k.D_f / (k.G_f * std::sqrt(static_cast<double>(T + 1)));
  }

  ControlTrace trace;
  trace.step_loss.reserve(T + 1);
  trace.learner_us.reserve(T + 1);
  trace.noises.reserve(T + 1);
  trace.decisions.reserve(T + 1);
  if (cfg.collect_diagnostics) trace.diagnostics.emplace();

  std::vector<Vec> probes;
  if (cfg.variation_probes > 0) {
    probes = variation_probes(m_space);
    if (static_cast<int>(probes.size()) > cfg.variation_probes)
      probes.resize(cfg.variation_probes);
  }
  std::vector<double> probe_prev(probes.size(), 0.0);
  bool probe_prev_valid = false;

  // rolling window of the last H+2 combined decisions, zero padded
  std::vector<BlockStack> m_window(H + 2, BlockStack::zero(shape));

  const auto counters_before = stats::counters();
  NoiseHistory history(d_x);
  Vec x = Vec::Zero(d_x);
  Vec prev_grad;
  Vec prev_decision;
  DacPolicy policy(H, gains, BlockStack::zero(shape));

  using clock = std::chrono::steady_clock;
  const auto advance_round = [&](long t) {
    // -- learner: combine the pool decision (timed)
    const auto tick_combine = clock::now();
    Vec m_t = pooled ? combine(pool_state.p, pool_state.base_x) : single_m;
    const auto tock_combine = clock::now();

    // -- actuate and observe the cost
    policy.M.flat = m_t;
    const Vec u = dac_action(policy, t, x, history);
    const double c_t = cost.value(t, x, u);
    trace.step_loss.push_back(c_t);
    trace.cumulative_loss += c_t;
    trace.decisions.push_back(m_t);

    m_window.erase(m_window.begin());
    m_window.push_back(BlockStack(shape, m_t));

    // -- plant evolves; the realized disturbance may depend on (x, u)
    const Vec w = noise(t, x, u);
    const Vec x_next = ltv_step(sys, t, x, u, w);

    // -- learner: losses, Hedge update, base updates (timed)
    const auto tick_update = clock::now();
    UnaryTruncatedLoss unary(sys, gains, cost, history, t, H);
    const Vec grad = unary.gradient(m_t);
    if (pooled) {
      const Eigen::VectorXd ell = surrogate_losses(grad, pool_state.base_x,
                                                   pool_state.prev_base_x, surrogate_lambda);
      pool_state.p = hedge_update(pool_state.p, ell, pool_state.epsilon);
      pool_state.prev_base_x = pool_state.base_x;
      for (int i = 0; i < pool_state.pool.size(); ++i) {
        if (cfg.kind == ControllerKind::meta_ofw)
          pool_state.base_x[i] =
              ofw_step({pool_state.base_x[i], pool_state.pool.etas[i]}, m_space, grad).x;
        else
          pool_state.base_x[i] =
              ogd_step({pool_state.base_x[i], pool_state.pool.etas[i]}, m_space, grad).x;
      }
    } else {
      single_m = ogd_step({single_m, single_eta}, m_space, grad).x;
    }
    const auto tock_update = clock::now();
    trace.learner_us.push_back(
        std::chrono::duration<double, std::micro>(tock_combine - tick_combine).count() +
        std::chrono::duration<double, std::micro>(tock_update - tick_update).count());

    // -- metrics
    if (t > 0) {
      trace.switching += (m_t - prev_decision).norm();
      trace.gradient_variation += (grad - prev_grad).squaredNorm();
    }
    if (!probes.empty()) {
      double worst = 0.0;
      for (size_t i = 0; i < probes.size(); ++i) {
        const double now = unary.value(probes[i]);
        if (probe_prev_valid) worst = std::max(worst, std::abs(now - probe_prev[i]));
        probe_prev[i] = now;
      }
      if (probe_prev_valid) trace.loss_variation += worst;
      probe_prev_valid = true;
    }
    if (trace.diagnostics) {
      auto& diag = *trace.diagnostics;
      diag.truncated_gap.push_back(
          std::abs(c_t - truncated_loss(cost, sys, gains, m_window, history, t)));
      const Vec y = surrogate_state_y(sys, gains, m_window, history, t);
      const Vec v = surrogate_action_v(sys, gains, m_window, history, t);
      diag.max_y_norm = std::max(diag.max_y_norm, y.norm());
      diag.max_v_norm = std::max(diag.max_v_norm, v.norm());
      const auto& block_set = std::get<BlockOpNormBall>(m_space);
      auto check_stack = [&](const Vec& m_flat) {
        for (int b = 0; b < H; ++b)
          diag.max_block_violation =
              std::max(diag.max_block_violation,
                       op_norm(block_view(m_flat, shape, b)) - block_set.radii[b]);
      };
      if (pooled)
        for (const Vec& bx : pool_state.base_x) check_stack(bx);
      else
        check_stack(single_m);
    }
    prev_grad = grad;
    prev_decision = std::move(m_t);

    // -- the controller observes x_{t+1} and recovers the noise
    Vec w_rec = recover_noise(sys, t, x, u, x_next);
    history.push(w_rec);
    trace.noises.push_back(std::move(w_rec));
    x = x_next;
  };

  for (long t = 0; t <= T; ++t) {
    try {
      advance_round(t);
    } catch (const std::exception& e) {
      throw std::runtime_error("run_controller: round " + std::to_string(t) + ": " + e.what());
    }
  }

  const auto counters_after = stats::counters();
  trace.lmo_calls = counters_after.lmo_calls - counters_before.lmo_calls;
  trace.projections = counters_after.projections - counters_before.projections;
  trace.gradient_evals = counters_after.gradient_evals - counters_before.gradient_evals;
  return trace;
}

ComparatorEval evaluate_gain_comparator(const LtvSystem& sys, const CostFunction& cost,
                                        const MatSchedule& gains,
                                        const MatSchedule& gains_star, int H,
                                        std::span<const Vec> noises, double kappa,
                                        double gamma) {
  const long T = static_cast<long>(noises.size()) - 1;
  if (T < 0) throw std::invalid_argument("evaluate_gain_comparator: empty noise record");

  ComparatorEval eval;
  Vec x = Vec::Zero(sys.d_x());
  for (long t = 0; t <= T; ++t) {
    const Vec u = -gains_star.at(t) * x;
    eval.cumulative_cost += cost.value(t, x, u);
    x = ltv_step(sys, t, x, u, noises[t]);
  }

  const auto comparator = dac_comparator_from_gains(sys, gains, gains_star, H, T, kappa, gamma);
  for (long t = 1; t <= T; ++t)
    eval.path_length += (comparator[t].flat - comparator[t - 1].flat).norm();
  return eval;
}

}  // namespace mofw
