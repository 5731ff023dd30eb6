#pragma once

#include <vector>

#include "mofw/ltv.hpp"
#include "mofw/types.hpp"

namespace mofw {

// Disturbance-action controller: u_t = -K_t x_t + sum_{i=1}^{H} M[i-1] w_{t-i}.
struct DacPolicy {
  int H;
  MatSchedule gains;  // K_t, d_u x d_x
  BlockStack M;       // H blocks, d_u x d_x

  DacPolicy(int h, MatSchedule k, BlockStack m);
};

Vec dac_action(const DacPolicy& policy, long t, const Vec& x, const NoiseHistory& noises);

// Similarity witness for the closed loop A - BK = Q L Q^{-1} with diagonal L.
struct StabilityWitness {
  bool stable = false;            // all four bounds hold
  double contraction = 0.0;       // ||L||_op = spectral radius of A - BK
  double gain_norm = 0.0;         // ||K||_op
  double basis_norm = 0.0;        // ||Q||_op
  double basis_inverse_norm = 0.0;  // ||Q^{-1}||_op
  double reconstruction_error = 0.0;
};

// Verifies (kappa, gamma)-strong stability through an eigendecomposition
// witness: ||L|| <= 1 - gamma and ||K||, ||Q||, ||Q^{-1}|| <= kappa, all
// within 1e-9 slack.  The witness only counts if Q L Q^{-1} reproduces
// A - BK to 1e-8 Frobenius; a defective closed loop throws.
StabilityWitness strong_stability_check(const Mat& A, const Mat& B, const Mat& K,
                                        double kappa, double gamma);

// Comparator blocks M*_t[i] = (K_t - K*_t) * prod_{tau=t-1..t-i}(A_tau - B_tau K*_tau)
// reproducing the K*-feedback trajectory through the DAC parameterization.
// Every K*_t must pass the strong-stability check; each block must respect
// the operator-norm bound 2 kappa^3 (1-gamma)^i.
std::vector<BlockStack> dac_comparator_from_gains(const LtvSystem& sys,
                                                  const MatSchedule& gains,
                                                  const MatSchedule& gains_star, int H,
                                                  long T, double kappa, double gamma);

}  // namespace mofw
