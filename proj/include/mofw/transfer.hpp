#pragma once

#include <span>
#include <vector>

#include "mofw/cost.hpp"
#include "mofw/ltv.hpp"
#include "mofw/types.hpp"

namespace mofw {

// prod_{tau = t_hi .. t_lo} (A_tau - B_tau K_tau), newest factor leftmost;
// identity when t_lo > t_hi.
Mat closed_loop_product(const LtvSystem& sys, const MatSchedule& gains, long t_hi,
                        long t_lo);

// Transfer matrix of past noise w_{t-i} in the closed-loop state one step
// ahead, with policies anchored h steps back:
//   Psi_{t,i}^{K,h} = Atilde_{K_{t:t-i+1}} 1{i <= h}
//                   + sum_{j=0}^{h} Atilde_{K_{t:t-j+1}} B_{t-j} M_{t-j}[i-j-1] 1{1 <= i-j <= H}.
// `m_window` covers M_{t-h} .. M_t, oldest first (h+1 stacks).
Mat transfer_matrix_psi(const LtvSystem& sys, const MatSchedule& gains,
                        std::span<const BlockStack> m_window, long t, int i, int h);

// Closed form of the reached state,
//   x_{t+1} = Atilde_{K_{t:t-h}} anchor + sum_{i=0}^{H+h} Psi_{t,i} w_{t-i},
// where `anchor` is the state at time t-h.  Requires 0 <= h <= t.
Vec state_via_psi(const LtvSystem& sys, const MatSchedule& gains,
                  std::span<const BlockStack> m_window, const NoiseHistory& noises, long t,
                  int h, const Vec& anchor);

// Surrogate state y_t: the state reached at time t from a zero state H+1
// steps back under the windowed policies and the recorded noises.
// `m_window` covers M_{t-1-H} .. M_t (H+2 stacks); y_t depends on the first
// H+1 of them only.
Vec surrogate_state_y(const LtvSystem& sys, const MatSchedule& gains,
                      std::span<const BlockStack> m_window, const NoiseHistory& noises,
                      long t);

// Surrogate action v_t = -K_t y_t + sum_i M_t[i-1] w_{t-i}.
Vec surrogate_action_v(const LtvSystem& sys, const MatSchedule& gains,
                       std::span<const BlockStack> m_window, const NoiseHistory& noises,
                       long t);

// Truncated loss f_t(M_{t-1-H:t}) = c_t(y_t, v_t).
double truncated_loss(const CostFunction& cost, const LtvSystem& sys,
                      const MatSchedule& gains, std::span<const BlockStack> m_window,
                      const NoiseHistory& noises, long t);

// The unary truncated loss f~_t(M) = f_t(M, ..., M).  The surrogate pair
// (y_t, v_t) is affine in M, so the round''s coefficient maps are assembled
// once (O(H d^3)) and reused for values, gradients, and probe evaluations.
class UnaryTruncatedLoss {
 public:
  UnaryTruncatedLoss(const LtvSystem& sys, const MatSchedule& gains,
                     const CostFunction& cost, const NoiseHistory& noises, long t, int H);

  const BlockShape& shape() const { return shape_; }

  double value(const Vec& m_flat) const;
  Vec gradient(const Vec& m_flat) const;  // instrumented as one gradient evaluation

  // (y, v) reached by playing M at every slot.
  std::pair<Vec, Vec> surrogate_pair(const Vec& m_flat) const;

 private:
  const CostFunction* cost_;
  long t_;
  BlockShape shape_;
  Mat k_now_;                  // K_t
  Vec alpha_;                  // noise drift of y independent of M
  std::vector<Mat> p_;        // P_j = Atilde_{K_{t-1:t-j}} B_{t-1-j}, j = 0..H
  std::vector<Vec> w_back_;   // w_{t-1-H-H} .. w_{t-1}, index by lag
  const Vec& noise_lag(long lag) const;  // w_{t-1-lag}
};

// Analytic gradient of the unary truncated loss at M.
Vec unary_truncated_gradient(const CostFunction& cost, const LtvSystem& sys,
                             const MatSchedule& gains, const NoiseHistory& noises, long t,
                             const Vec& m_flat, int H);

}  // namespace mofw
