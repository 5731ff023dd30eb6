#pragma once

#include "mofw/feasible_set.hpp"
#include "mofw/types.hpp"

namespace mofw {

// Conditional-gradient learner: one linear minimization per step,
// x <- (1-eta) x + eta argmin_v <g, v>.
struct OfwState {
  Vec x;
  double eta;
};

OfwState ofw_step(const OfwState& state, const FeasibleSet& set, const Vec& g);

// Projected-gradient learner: x <- project(x - eta g).
struct OgdState {
  Vec x;
  double eta;
};

OgdState ogd_step(const OgdState& state, const FeasibleSet& set, const Vec& g);

// min(1, 1/sqrt(T))
double step_size_sqrt_horizon(long T);

// min(1, sqrt((1 + v_bar) / T)) for an a-priori bound v_bar on the loss variation.
double step_size_known_variation(long T, double v_bar);

// sqrt(c / b) for a user-supplied constant b > c; the caller owns the choice
// of b, nothing here derives it.
double step_size_constant_ratio(double c, double b);

}  // namespace mofw
