#include "mofw/meta.hpp"

#include <cmath>

namespace mofw {

StepPool geometric_step_pool(int max_learners, double eta_base) {
  if (max_learners < 1) throw std::invalid_argument("geometric_step_pool: need N >= 1");
  if (!(eta_base > 0.0) || !std::isfinite(eta_base))
    throw std::invalid_argument("geometric_step_pool: eta_base must be positive and finite");
  StepPool pool;
  for (int i = 0; i < max_learners; ++i) {
    const double eta = std::min(1.0, std::ldexp(eta_base, i));
    if (!pool.etas.empty() && eta == pool.etas.back()) break;  // clamped duplicate
    pool.etas.push_back(eta);
  }
  return pool;
}

StepPool build_step_pool(long T, double a, double c, double lambda, double D) {
  if (T < 1) throw std::invalid_argument("build_step_pool: T must be positive");
  if (a < 0.0) throw std::invalid_argument("build_step_pool: a must be nonnegative");
  if (!(c > 0.0)) throw std::invalid_argument("build_step_pool: c must be positive");
  if (!(lambda > 0.0)) throw std::invalid_argument("build_step_pool: lambda must be positive");
  if (!(D > 0.0)) throw std::invalid_argument("build_step_pool: D must be positive");
  const double alpha = 2.0 * (a + c);
  const double n_real = std::ceil(0.5 * std::log2(1.0 + T * c / alpha)) + 1.0;
  const int n = std::max(1, static_cast<int>(n_real));
  const double eta_base = std::sqrt(alpha / (lambda * static_cast<double>(T) * D));
  return geometric_step_pool(n, eta_base);
}

Eigen::VectorXd init_weights(int N) {
  if (N < 1) throw std::invalid_argument("init_weights: N must be positive");
  Eigen::VectorXd p(N);
  if (N == 1) {
    p[0] = 1.0;
    return p;
  }
  const double scale = static_cast<double>(N + 1) / N;
  double partial = 0.0;
  for (int i = 1; i < N; ++i) {
    p[i - 1] = scale / (static_cast<double>(i) * (i + 1));
    partial += p[i - 1];
  }
  p[N - 1] = 1.0 - partial;
  return p;
}

double meta_rate(double lambda, double G, double D, long T) {
  if (lambda < 0.0) throw std::invalid_argument("meta_rate: lambda must be nonnegative");
  if (!(G >= 0.0) || !(lambda + G > 0.0))
    throw std::invalid_argument("meta_rate: need lambda + G > 0");
  if (!(D > 0.0)) throw std::invalid_argument("meta_rate: D must be positive");
  if (T < 1) throw std::invalid_argument("meta_rate: T must be positive");
  return std::sqrt(2.0 / ((2.0 * lambda + G) * (lambda + G) * D * D * static_cast<double>(T)));
}

double linearized_loss(const Vec& grad_at_combined, const Vec& x) {
  require_same_size(grad_at_combined, x, "linearized_loss");
  return grad_at_combined.dot(x);
}

Eigen::VectorXd surrogate_losses(const Vec& grad, std::span<const Vec> base_xs,
                                 std::span<const Vec> prev_xs, double lambda) {
  if (base_xs.empty() || base_xs.size() != prev_xs.size())
    throw std::invalid_argument("surrogate_losses: need matching nonempty decision lists");
  if (lambda < 0.0) throw std::invalid_argument("surrogate_losses: lambda must be nonnegative");
  Eigen::VectorXd ell(static_cast<int>(base_xs.size()));
  for (size_t i = 0; i < base_xs.size(); ++i) {
    require_same_size(grad, base_xs[i], "surrogate_losses");
    require_same_size(base_xs[i], prev_xs[i], "surrogate_losses");
    ell[static_cast<int>(i)] =
        grad.dot(base_xs[i]) + lambda * (base_xs[i] - prev_xs[i]).norm();
  }
  return ell;
}

Eigen::VectorXd hedge_update(const Eigen::VectorXd& p, const Eigen::VectorXd& losses,
                             double epsilon) {
  if (p.size() != losses.size()) throw std::invalid_argument("hedge_update: size mismatch");
  if (!(epsilon > 0.0)) throw std::invalid_argument("hedge_update: epsilon must be positive");
  if (!losses.allFinite()) throw std::invalid_argument("hedge_update: non-finite losses");
  if ((p.array() < 0.0).any() || std::abs(p.sum() - 1.0) > 1e-9)
    throw std::invalid_argument("hedge_update: weights are off the simplex");
  const double shift = losses.minCoeff();
  Eigen::VectorXd w = p.array() * (-epsilon * (losses.array() - shift)).exp();
  return w / w.sum();
}

Vec combine(const Eigen::VectorXd& p, std::span<const Vec> base_xs) {
  if (static_cast<size_t>(p.size()) != base_xs.size() || base_xs.empty())
    throw std::invalid_argument("combine: size mismatch");
  if ((p.array() < 0.0).any() || std::abs(p.sum() - 1.0) > 1e-9)
    throw std::invalid_argument("combine: weights are off the simplex");
  Vec x = Vec::Zero(base_xs[0].size());
  for (size_t i = 0; i < base_xs.size(); ++i) {
    require_same_size(x, base_xs[i], "combine");
    x += p[static_cast<int>(i)] * base_xs[i];
  }
  return x;
}

MetaOfwState make_meta_state(const FeasibleSet& set, StepPool pool, double epsilon,
                             double lambda) {
  if (pool.size() < 1) throw std::invalid_argument("make_meta_state: empty step pool");
  MetaOfwState s;
  s.p = init_weights(pool.size());
  s.base_x.assign(pool.size(), initial_point(set));
  s.prev_base_x = s.base_x;  // zero switching on the first round
  s.pool = std::move(pool);
  s.epsilon = epsilon;
  s.lambda = lambda;
  return s;
}

namespace {

enum class BaseKind { frank_wolfe, projected_gradient };

RoundResult run_round(MetaOfwState& s, const FeasibleSet& set, const LossOracle& oracle,
                      long t, RollingWindow& window, BaseKind kind, double surrogate_lambda) {
  const Vec x_t = combine(s.p, s.base_x);
  window.push(x_t);
  const double incurred = oracle.value_with_memory(t, window.slots());
  const Vec grad = oracle.unary_gradient(t, x_t);

  const Eigen::VectorXd ell = surrogate_losses(grad, s.base_x, s.prev_base_x, surrogate_lambda);
  s.p = hedge_update(s.p, ell, s.epsilon);

  s.prev_base_x = s.base_x;
  for (int i = 0; i < s.pool.size(); ++i) {
    if (kind == BaseKind::frank_wolfe)
      s.base_x[i] = ofw_step({s.base_x[i], s.pool.etas[i]}, set, grad).x;
    else
      s.base_x[i] = ogd_step({s.base_x[i], s.pool.etas[i]}, set, grad).x;
  }
  return {x_t, incurred};
}

}  // namespace

RoundResult meta_ofw_round(MetaOfwState& state, const FeasibleSet& set,
                           const LossOracle& oracle, long t, RollingWindow& window) {
  return run_round(state, set, oracle, t, window, BaseKind::frank_wolfe, state.lambda);
}

RoundResult scream_round(MetaOfwState& state, const FeasibleSet& set,
                         const LossOracle& oracle, long t, RollingWindow& window) {
  return run_round(state, set, oracle, t, window, BaseKind::projected_gradient, state.lambda);
}

RoundResult ader_round(MetaOfwState& state, const FeasibleSet& set, const LossOracle& oracle,
                       long t, RollingWindow& window) {
  return run_round(state, set, oracle, t, window, BaseKind::projected_gradient, 0.0);
}

}  // namespace mofw
