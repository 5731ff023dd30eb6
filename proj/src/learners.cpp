#include "mofw/learners.hpp"

#include <cmath>

namespace mofw {

OfwState ofw_step(const OfwState& state, const FeasibleSet& set, const Vec& g) {
  if (state.x.size() != dim(set) || g.size() != dim(set))
    throw std::invalid_argument("ofw_step: dimension mismatch");
  if (!(state.eta > 0.0 && state.eta <= 1.0))
    throw std::invalid_argument("ofw_step: eta must lie in (0, 1]");
  const Vec vertex = lmo(set, g);
  return {(1.0 - state.eta) * state.x + state.eta * vertex, state.eta};
}

OgdState ogd_step(const OgdState& state, const FeasibleSet& set, const Vec& g) {
  if (state.x.size() != dim(set) || g.size() != dim(set))
    throw std::invalid_argument("ogd_step: dimension mismatch");
  if (!(state.eta > 0.0)) throw std::invalid_argument("ogd_step: eta must be positive");
  return {project(set, state.x - state.eta * g), state.eta};
}

double step_size_sqrt_horizon(long T) {
  if (T < 1) throw std::invalid_argument("step_size_sqrt_horizon: T must be positive");
  return std::min(1.0, 1.0 / std::sqrt(static_cast<double>(T)));
}

double step_size_known_variation(long T, double v_bar) {
  if (T < 1) throw std::invalid_argument("step_size_known_variation: T must be positive");
  if (v_bar < 0.0)
    throw std::invalid_argument("step_size_known_variation: v_bar must be nonnegative");
  return std::min(1.0, std::sqrt((1.0 + v_bar) / static_cast<double>(T)));
}

double step_size_constant_ratio(double c, double b) {
  if (!(c > 0.0) || !(b > c))
    throw std::invalid_argument("step_size_constant_ratio: need 0 < c < b");
  return std::sqrt(c / b);
}

}  // namespace mofw
