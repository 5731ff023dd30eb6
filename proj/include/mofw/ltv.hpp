#pragma once

#include <vector>

#include "mofw/types.hpp"

namespace mofw {

// Time-indexed matrix sequence; holding a single entry means time-invariant.
class MatSchedule {
 public:
  MatSchedule() = default;
  explicit MatSchedule(Mat m) : mats_{std::move(m)} {}
  explicit MatSchedule(std::vector<Mat> ms) : mats_(std::move(ms)) {
    if (mats_.empty()) throw std::invalid_argument("MatSchedule: empty sequence");
  }

  const Mat& at(long t) const {
    if (mats_.size() == 1) return mats_[0];
    if (t < 0 || t >= static_cast<long>(mats_.size()))
      throw std::out_of_range("MatSchedule: time index out of range");
    return mats_[t];
  }
  bool time_invariant() const { return mats_.size() == 1; }
  long entries() const { return static_cast<long>(mats_.size()); }

 private:
  std::vector<Mat> mats_;
};

// x_{t+1} = A_t x_t + B_t u_t + w_t with declared operator-norm bounds on the
// matrices and an l2 bound W on the noise.
struct LtvSystem {
  long horizon;  // valid step indices are 0..horizon
  MatSchedule A;
  MatSchedule B;
  double kappa_A;
  double kappa_B;
  double W;

  LtvSystem(long T, MatSchedule a, MatSchedule b, double ka, double kb, double w);

  int d_x() const { return static_cast<int>(A.at(0).rows()); }
  int d_u() const { return static_cast<int>(B.at(0).cols()); }
};

Vec ltv_step(const LtvSystem& sys, long t, const Vec& x, const Vec& u, const Vec& w);

// w_t = x_{t+1} - A_t x_t - B_t u_t
Vec recover_noise(const LtvSystem& sys, long t, const Vec& x_t, const Vec& u_t,
                  const Vec& x_next);

// Append-only noise record with w_tau = 0 for tau < 0.
class NoiseHistory {
 public:
  explicit NoiseHistory(int d_x) : zero_(Vec::Zero(d_x)) {}

  void push(const Vec& w) {
    require_same_size(w, zero_, "NoiseHistory::push");
    w_.push_back(w);
  }
  const Vec& at(long tau) const {
    if (tau < 0) return zero_;
    if (tau >= static_cast<long>(w_.size()))
      throw std::out_of_range("NoiseHistory: future noise requested");
    return w_[tau];
  }
  long size() const { return static_cast<long>(w_.size()); }
  int dim() const { return static_cast<int>(zero_.size()); }

 private:
  std::vector<Vec> w_;
  Vec zero_;
};

}  // namespace mofw
