#pragma once

#include <functional>

#include "mofw/types.hpp"

namespace mofw {

// Per-step control cost c_t(x, u) with gradients in both arguments.  For
// ||x||, ||u|| <= D the value is bounded by beta * D^2 and each gradient by
// G_c * D.
class CostFunction {
 public:
  virtual ~CostFunction() = default;

  double beta() const { return beta_; }
  double gradient_scale() const { return g_c_; }

  virtual double value(long t, const Vec& x, const Vec& u) const = 0;
  virtual Vec grad_x(long t, const Vec& x, const Vec& u) const = 0;
  virtual Vec grad_u(long t, const Vec& x, const Vec& u) const = 0;

 protected:
  CostFunction(double beta, double g_c) : beta_(beta), g_c_(g_c) {
    if (!(beta > 0.0) || !(g_c > 0.0))
      throw std::invalid_argument("CostFunction: bounds must be positive");
  }

 private:
  double beta_;
  double g_c_;
};

// c_t(x, u) = q(t) x'x + r(t) u'u.  With |q|, |r| <= w_max this satisfies
// beta = 2 w_max and G_c = 2 w_max.
class QuadraticCost : public CostFunction {
 public:
  using Weights = std::function<std::pair<double, double>(long)>;

  QuadraticCost(Weights weights, double weight_bound)
      : CostFunction(2.0 * weight_bound, 2.0 * weight_bound),
        weights_(std::move(weights)) {
    if (!weights_) throw std::invalid_argument("QuadraticCost: missing weight schedule");
  }

  double value(long t, const Vec& x, const Vec& u) const override {
    auto [q, r] = weights_(t);
    return q * x.squaredNorm() + r * u.squaredNorm();
  }
  Vec grad_x(long t, const Vec& x, const Vec&) const override {
    return 2.0 * weights_(t).first * x;
  }
  Vec grad_u(long t, const Vec&, const Vec& u) const override {
    return 2.0 * weights_(t).second * u;
  }

 private:
  Weights weights_;
};

}  // namespace mofw
