#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "mofw/feasible_set.hpp"
#include "mofw/types.hpp"

namespace mofw {

// Time-indexed convex loss with memory m: the round-t loss is evaluated on
// the window (x_{t-m}, ..., x_t), oldest slot first.  The unary loss is the
// same function with all slots equal.  Bounds: values in [a, a+c],
// coordinate-wise Lipschitz constant L, unary gradient norm at most G.
class LossOracle {
 public:
  virtual ~LossOracle() = default;

  int memory() const { return m_; }
  double value_floor() const { return a_; }
  double value_range() const { return c_; }
  double lipschitz() const { return lipschitz_; }
  double gradient_bound() const { return gradient_bound_; }

  double value_with_memory(long t, std::span<const Vec> window) const;
  double unary_value(long t, const Vec& x) const;
  Vec unary_gradient(long t, const Vec& x) const;  // instrumented

  // Exact sup_x |f~_t(x) - f~_{t-1}(x)| when analytically available;
  // callers fall back to probe maximization otherwise.
  virtual std::optional<double> variation_sup(long /*t*/) const { return std::nullopt; }

 protected:
  LossOracle(int m, double a, double c, double lipschitz, double gradient_bound);

  virtual double do_value(long t, std::span<const Vec> window) const = 0;
  virtual Vec do_unary_gradient(long t, const Vec& x) const = 0;

 private:
  int m_;
  double a_;
  double c_;
  double lipschitz_;
  double gradient_bound_;
};

// Rolling decision window of m+1 slots, oldest first, zero-initialized so
// that x_{t-m} = 0 for t <= m.
class RollingWindow {
 public:
  RollingWindow(int m, int dim);
  void push(const Vec& x);
  std::span<const Vec> slots() const { return slots_; }
  const Vec& newest() const { return slots_.back(); }

 private:
  std::vector<Vec> slots_;
};

// Bench loss family: f_t(w_0, ..., w_m) = q(t) * || sum_j c_j w_j - theta ||^2
// with slot weights c_j >= 0 summing to one, so the unary loss is
// q(t) * ||x - theta||^2.  q must stay nonnegative.
class QuadraticMemoryLoss : public LossOracle {
 public:
  QuadraticMemoryLoss(const FeasibleSet& domain, int m, Vec slot_weights, Vec theta,
                      std::function<double(long)> q = nullptr, double q_max = 1.0);

  std::optional<double> variation_sup(long t) const override;

 protected:
  double do_value(long t, std::span<const Vec> window) const override;
  Vec do_unary_gradient(long t, const Vec& x) const override;

 private:
  struct Bounds {
    double c, lipschitz, gradient, sup_dist_sq;
    bool exact_sup;
  };
  static Bounds derive_bounds(const FeasibleSet& domain, const Vec& slot_weights,
                              const Vec& theta, double q_max);
  QuadraticMemoryLoss(Bounds b, int m, Vec slot_weights, Vec theta,
                      std::function<double(long)> q);

  double q_at(long t) const { return q_ ? q_(t) : 1.0; }

  Vec slot_weights_;
  Vec theta_;
  std::function<double(long)> q_;
  double sup_dist_sq_ = 0.0;
  bool exact_sup_ = false;  // true when the sup is exact, not just an upper bound
};

}  // namespace mofw
