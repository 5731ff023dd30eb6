#include "mofw/noise.hpp"

#include <cmath>

namespace mofw {

const char* noise_name(NoiseDistribution d) {
  switch (d) {
    case NoiseDistribution::gaussian: return "gaussian";
    case NoiseDistribution::uniform: return "uniform";
    case NoiseDistribution::gamma: return "gamma";
    case NoiseDistribution::beta: return "beta";
    case NoiseDistribution::exponential: return "exponential";
    case NoiseDistribution::weibull: return "weibull";
  }
  return "unknown";
}

std::optional<NoiseDistribution> noise_from_name(std::string_view name) {
  if (name == "gaussian") return NoiseDistribution::gaussian;
  if (name == "uniform") return NoiseDistribution::uniform;
  if (name == "gamma") return NoiseDistribution::gamma;
  if (name == "beta") return NoiseDistribution::beta;
  if (name == "exponential") return NoiseDistribution::exponential;
  if (name == "weibull") return NoiseDistribution::weibull;
  return std::nullopt;
}

double noise_mean(const NoiseSpec& spec) {
  switch (spec.distribution) {
    case NoiseDistribution::gaussian: return 0.0;
    case NoiseDistribution::uniform: return 0.0;
    case NoiseDistribution::gamma: return spec.gamma_shape * spec.gamma_scale;
    case NoiseDistribution::beta: return spec.beta_a / (spec.beta_a + spec.beta_b);
    case NoiseDistribution::exponential: return 1.0 / spec.exponential_rate;
    case NoiseDistribution::weibull:
      return spec.weibull_scale * std::tgamma(1.0 + 1.0 / spec.weibull_shape);
  }
  return 0.0;
}

namespace {

void validate(const NoiseSpec& spec) {
  const bool ok = spec.gaussian_stddev >= 0.0 && spec.uniform_halfwidth >= 0.0 &&
                  spec.gamma_shape > 0.0 && spec.gamma_scale > 0.0 && spec.beta_a > 0.0 &&
                  spec.beta_b > 0.0 && spec.exponential_rate > 0.0 &&
                  spec.weibull_shape > 0.0 && spec.weibull_scale > 0.0 &&
                  spec.delta_a_scale >= 0.0 && spec.delta_b_scale >= 0.0 && spec.W > 0.0;
  if (!ok) throw std::invalid_argument("NoiseSpec: invalid distribution parameters");
}

double draw_centered(const NoiseSpec& spec, std::mt19937_64& rng) {
  switch (spec.distribution) {
    case NoiseDistribution::gaussian: {
      std::normal_distribution<double> d(0.0, spec.gaussian_stddev);
      return d(rng);
    }
    case NoiseDistribution::uniform: {
      std::uniform_real_distribution<double> d(-spec.uniform_halfwidth,
                                               spec.uniform_halfwidth);
      return d(rng);
    }
    case NoiseDistribution::gamma: {
      std::gamma_distribution<double> d(spec.gamma_shape, spec.gamma_scale);
      return d(rng) - noise_mean(spec);
    }
    case NoiseDistribution::beta: {
      // ratio-of-gammas construction
      std::gamma_distribution<double> da(spec.beta_a, 1.0);
      std::gamma_distribution<double> db(spec.beta_b, 1.0);
      const double ga = da(rng);
      const double gb = db(rng);
      return ga / (ga + gb) - noise_mean(spec);
    }
    case NoiseDistribution::exponential: {
      std::exponential_distribution<double> d(spec.exponential_rate);
      return d(rng) - noise_mean(spec);
    }
    case NoiseDistribution::weibull: {
      std::weibull_distribution<double> d(spec.weibull_shape, spec.weibull_scale);
      return d(rng) - noise_mean(spec);
    }
  }
  return 0.0;
}

}  // namespace

NoiseSample sample_noise(const NoiseSpec& spec, long /*t*/, int d_x, int d_u,
                         std::mt19937_64& rng) {
  validate(spec);
  if (d_x < 1 || d_u < 1) throw std::invalid_argument("sample_noise: bad dimensions");
  NoiseSample s;
  s.w_tilde.resize(d_x);
  for (int i = 0; i < d_x; ++i) s.w_tilde[i] = draw_centered(spec, rng);
  s.delta_a.resize(d_x, d_x);
  for (int i = 0; i < d_x; ++i)
    for (int j = 0; j < d_x; ++j) s.delta_a(i, j) = spec.delta_a_scale * draw_centered(spec, rng);
  s.delta_b.resize(d_x, d_u);
  for (int i = 0; i < d_x; ++i)
    for (int j = 0; j < d_u; ++j) s.delta_b(i, j) = spec.delta_b_scale * draw_centered(spec, rng);
  return s;
}

NoiseSource make_perturbed_noise_source(const NoiseSpec& spec, int d_x, int d_u,
                                        std::uint64_t seed,
                                        std::shared_ptr<ClipStats> stats) {
  validate(spec);
  auto rng = std::make_shared<std::mt19937_64>(seed);
  return [spec, d_x, d_u, rng, stats](long t, const Vec& x, const Vec& u) -> Vec {
    const NoiseSample s = sample_noise(spec, t, d_x, d_u, *rng);
    Vec w = s.delta_a * x + s.delta_b * u + s.w_tilde;
    const double norm = w.norm();
    if (stats) ++stats->total;
    if (norm > spec.W) {
      w *= spec.W / norm;
      if (stats) ++stats->clipped;
    }
    return w;
  };
}

}  // namespace mofw
