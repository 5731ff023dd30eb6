#include "mofw/metrics.hpp"

#include <cmath>
#include <random>

namespace mofw {

void MetricTracker::update(long t, std::span<const Vec> learner_window,
                           std::span<const Vec> comparator_window, const LossOracle& oracle,
                           const Vec& grad, std::span<const Vec> variation_probe) {
  const int m = oracle.memory();
  if (static_cast<int>(learner_window.size()) != m + 1 ||
      static_cast<int>(comparator_window.size()) != m + 1)
    throw std::invalid_argument("MetricTracker: window must hold m+1 decisions");

  learner_loss_ += oracle.value_with_memory(t, learner_window);
  comparator_loss_ += oracle.value_with_memory(t, comparator_window);

  const Vec& x = learner_window.back();
  const Vec& v = comparator_window.back();

  if (prev_t_) {
    dt_ += (grad - *prev_grad_).squaredNorm();
    ct_ += (v - *prev_v_).norm();
    switch_ += (x - *prev_x_).norm();
    if (auto exact = oracle.variation_sup(t)) {
      vt_ += *exact;
    } else {
      double worst = 0.0;
      for (const Vec& p : variation_probe)
        worst = std::max(worst,
                         std::abs(oracle.unary_value(t, p) - oracle.unary_value(t - 1, p)));
      vt_ += worst;
    }
  }
  prev_grad_ = grad;
  prev_x_ = x;
  prev_v_ = v;
  prev_t_ = t;
}

namespace {

double halton(long index, int base) {
  double f = 1.0, r = 0.0;
  for (long i = index; i > 0; i /= base) {
    f /= base;
    r += f * (i % base);
  }
  return r;
}

int nth_prime(int n) {
  static const int primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
                               43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};
  return primes[n % (sizeof(primes) / sizeof(primes[0]))];
}

}  // namespace

std::vector<Vec> variation_probes(const FeasibleSet& set) {
  std::vector<Vec> probes;
  if (const auto* box = std::get_if<Box>(&set)) {
    const int d = static_cast<int>(box->lower.size());
    if (d <= 6) {
      for (long mask = 0; mask < (1L << d); ++mask) {
        Vec v(d);
        for (int i = 0; i < d; ++i) v[i] = (mask >> i) & 1 ? box->upper[i] : box->lower[i];
        probes.push_back(std::move(v));
      }
      return probes;
    }
  }
  if (const auto* sx = std::get_if<Simplex>(&set)) {
    for (int j = 0; j < sx->dim; ++j) {
      Vec v = Vec::Zero(sx->dim);
      v[j] = 1.0;
      probes.push_back(std::move(v));
    }
    return probes;
  }
  const int d = dim(set);
  const double scale = diameter(set);
  if (d <= 25) {
    for (long k = 1; k <= 64; ++k) {
      Vec v(d);
      for (int i = 0; i < d; ++i) v[i] = scale * (halton(k, nth_prime(i)) - 0.5);
      probes.push_back(project(set, v));
    }
  } else {
    // Halton bases run out well before this; a fixed-seed generator keeps the
    // probe set deterministic.
    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> unit(-0.5, 0.5);
    for (int k = 0; k < 64; ++k) {
      Vec v(d);
      for (int i = 0; i < d; ++i) v[i] = scale * unit(rng);
      probes.push_back(project(set, v));
    }
  }
  return probes;
}

}  // namespace mofw
