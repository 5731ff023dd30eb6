#include "mofw/loss.hpp"

#include <cmath>

#include "mofw/instrumentation.hpp"

namespace mofw {

LossOracle::LossOracle(int m, double a, double c, double lipschitz, double gradient_bound)
    : m_(m), a_(a), c_(c), lipschitz_(lipschitz), gradient_bound_(gradient_bound) {
  if (m < 0) throw std::invalid_argument("LossOracle: memory must be nonnegative");
  if (a < 0.0 || c < 0.0)
    throw std::invalid_argument("LossOracle: value bounds must be nonnegative");
}

double LossOracle::value_with_memory(long t, std::span<const Vec> window) const {
  if (static_cast<int>(window.size()) != m_ + 1)
    throw std::invalid_argument("value_with_memory: window must hold m+1 decisions");
  return do_value(t, window);
}

double LossOracle::unary_value(long t, const Vec& x) const {
  std::vector<Vec> window(m_ + 1, x);
  return do_value(t, window);
}

Vec LossOracle::unary_gradient(long t, const Vec& x) const {
  ++stats::counters().gradient_evals;
  return do_unary_gradient(t, x);
}

RollingWindow::RollingWindow(int m, int dim) : slots_(m + 1, Vec::Zero(dim)) {
  if (m < 0 || dim < 1) throw std::invalid_argument("RollingWindow: bad arguments");
}

void RollingWindow::push(const Vec& x) {
  slots_.erase(slots_.begin());
  slots_.push_back(x);
}

namespace {

// sup over the domain of ||x - theta||^2; exact for box (separable) and
// simplex (vertex maximum of a convex function), conservative otherwise.
std::pair<double, bool> sup_dist_sq(const FeasibleSet& domain, const Vec& theta) {
  if (const auto* box = std::get_if<Box>(&domain)) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      const double lo = box->lower[i] - theta[i];
      const double hi = box->upper[i] - theta[i];
      s += std::max(lo * lo, hi * hi);
    }
    return {s, true};
  }
  if (const auto* ball = std::get_if<Ball>(&domain)) {
    const double d = (ball->center - theta).norm() + ball->radius;
    return {d * d, true};
  }
  if (const auto* sx = std::get_if<Simplex>(&domain)) {
    double best = 0.0;
    for (int j = 0; j < sx->dim; ++j) {
      Vec v = Vec::Zero(sx->dim);
      v[j] = 1.0;
      best = std::max(best, (v - theta).squaredNorm());
    }
    return {best, true};
  }
  const double d = theta.norm() + 0.5 * diameter(domain);
  return {d * d, false};
}

}  // namespace

QuadraticMemoryLoss::Bounds QuadraticMemoryLoss::derive_bounds(const FeasibleSet& domain,
                                                               const Vec& slot_weights,
                                                               const Vec& theta,
                                                               double q_max) {
  if (slot_weights.size() < 1 || (slot_weights.array() < 0.0).any() ||
      std::abs(slot_weights.sum() - 1.0) > 1e-12)
    throw std::invalid_argument("QuadraticMemoryLoss: slot weights must be a convex combination");
  if (theta.size() != dim(domain))
    throw std::invalid_argument("QuadraticMemoryLoss: theta dimension mismatch");
  if (q_max < 0.0) throw std::invalid_argument("QuadraticMemoryLoss: q_max must be nonnegative");
  auto [sq, exact] = sup_dist_sq(domain, theta);
  const double sup_dist = std::sqrt(sq);
  return Bounds{q_max * sq, 2.0 * q_max * sup_dist * slot_weights.maxCoeff(),
                2.0 * q_max * sup_dist, sq, exact};
}

QuadraticMemoryLoss::QuadraticMemoryLoss(const FeasibleSet& domain, int m, Vec slot_weights,
                                         Vec theta, std::function<double(long)> q,
                                         double q_max)
    // arguments are copied, not moved: evaluation order must not starve derive_bounds
    : QuadraticMemoryLoss(derive_bounds(domain, slot_weights, theta, q_max), m, slot_weights,
                          theta, std::move(q)) {}

QuadraticMemoryLoss::QuadraticMemoryLoss(Bounds b, int m, Vec slot_weights, Vec theta,
                                         std::function<double(long)> q)
    : LossOracle(m, 0.0, b.c, b.lipschitz, b.gradient),
      slot_weights_(std::move(slot_weights)),
      theta_(std::move(theta)),
      q_(std::move(q)),
      sup_dist_sq_(b.sup_dist_sq),
      exact_sup_(b.exact_sup) {
  if (slot_weights_.size() != m + 1)
    throw std::invalid_argument("QuadraticMemoryLoss: one slot weight per window slot");
}

double QuadraticMemoryLoss::do_value(long t, std::span<const Vec> window) const {
  Vec z = Vec::Zero(theta_.size());
  for (size_t j = 0; j < window.size(); ++j) z += slot_weights_[j] * window[j];
  return q_at(t) * (z - theta_).squaredNorm();
}

Vec QuadraticMemoryLoss::do_unary_gradient(long t, const Vec& x) const {
  return 2.0 * q_at(t) * (x - theta_);
}

std::optional<double> QuadraticMemoryLoss::variation_sup(long t) const {
  if (!exact_sup_) return std::nullopt;
  const double dq = std::abs(q_at(t) - q_at(t - 1));
  return dq * sup_dist_sq_;
}

}  // namespace mofw
