#pragma once

#include <memory>
#include <random>
#include <optional>
#include <string_view>

#include "mofw/control.hpp"
#include "mofw/types.hpp"

namespace mofw {

enum class NoiseDistribution { gaussian, uniform, gamma, beta, exponential, weibull };

const char* noise_name(NoiseDistribution d);
std::optional<NoiseDistribution> noise_from_name(std::string_view name);

// Sampling recipe for the perturbed plant
//   x_{t+1} = A x_t + B u_t + (Delta_A x_t + Delta_B u_t + w~_t):
// every scalar entry is an independent draw from the chosen distribution,
// shifted by its analytic mean so the noise is zero-mean; the composite
// disturbance is clipped radially to the W-ball.
struct NoiseSpec {
  NoiseDistribution distribution = NoiseDistribution::gaussian;

  double gaussian_stddev = 0.25;
  double uniform_halfwidth = 0.5;
  double gamma_shape = 2.0;
  double gamma_scale = 0.5;
  double beta_a = 2.0;
  double beta_b = 2.0;
  double exponential_rate = 1.0;
  double weibull_shape = 1.5;
  double weibull_scale = 1.0;

  double delta_a_scale = 0.01;  // entry scale of Delta_A
  double delta_b_scale = 0.01;  // entry scale of Delta_B
  double W = 0.5;               // clip bound on the composite disturbance
};

// Mean of one raw draw before centering.
double noise_mean(const NoiseSpec& spec);

struct NoiseSample {
  Vec w_tilde;   // d_x
  Mat delta_a;   // d_x x d_x
  Mat delta_b;   // d_x x d_u
};

// One round of raw draws: centered w~_t and perturbation matrices, in a fixed
// draw order so a fixed stream reproduces byte-identical sequences.
NoiseSample sample_noise(const NoiseSpec& spec, long t, int d_x, int d_u,
                         std::mt19937_64& rng);

struct ClipStats {
  long clipped = 0;
  long total = 0;
  double rate() const { return total == 0 ? 0.0 : static_cast<double>(clipped) / total; }
};

// Plant-noise source w_t = clip_W(Delta_A x + Delta_B u + w~_t).
NoiseSource make_perturbed_noise_source(const NoiseSpec& spec, int d_x, int d_u,
                                        std::uint64_t seed,
                                        std::shared_ptr<ClipStats> stats = nullptr);

}  // namespace mofw
