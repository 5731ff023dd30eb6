#include "mofw/transfer.hpp"

#include "mofw/instrumentation.hpp"

namespace mofw {

Mat closed_loop_product(const LtvSystem& sys, const MatSchedule& gains, long t_hi,
                        long t_lo) {
  const int d_x = sys.d_x();
  Mat prod = Mat::Identity(d_x, d_x);
  for (long tau = t_hi; tau >= t_lo; --tau) {
    if (tau < 0) throw std::out_of_range("closed_loop_product: negative time index");
    prod *= sys.A.at(tau) - sys.B.at(tau) * gains.at(tau);
  }
  return prod;
}

Mat transfer_matrix_psi(const LtvSystem& sys, const MatSchedule& gains,
                        std::span<const BlockStack> m_window, long t, int i, int h) {
  if (h < 0 || h > t) throw std::out_of_range("transfer_matrix_psi: need 0 <= h <= t");
  if (static_cast<int>(m_window.size()) != h + 1)
    throw std::invalid_argument("transfer_matrix_psi: window must cover M_{t-h}..M_t");
  const int H = m_window.empty() ? 0 : m_window.front().shape.blocks;
  if (i < 0 || i > H + h) throw std::out_of_range("transfer_matrix_psi: i out of range");

  const int d_x = sys.d_x();
  Mat psi = Mat::Zero(d_x, d_x);
  if (i <= h) psi = closed_loop_product(sys, gains, t, t - i + 1);

  // prefix = Atilde_{K_{t:t-j+1}}, built incrementally over j
  Mat prefix = Mat::Identity(d_x, d_x);
  for (int j = 0; j <= h; ++j) {
    if (j > 0) prefix *= sys.A.at(t - j + 1) - sys.B.at(t - j + 1) * gains.at(t - j + 1);
    const int block = i - j - 1;
    if (block >= 0 && block < H)
      psi += prefix * sys.B.at(t - j) * m_window[h - j].block(block);
  }
  return psi;
}

Vec state_via_psi(const LtvSystem& sys, const MatSchedule& gains,
                  std::span<const BlockStack> m_window, const NoiseHistory& noises, long t,
                  int h, const Vec& anchor) {
  if (h < 0 || h > t) throw std::out_of_range("state_via_psi: need 0 <= h <= t");
  if (anchor.size() != sys.d_x())
    throw std::invalid_argument("state_via_psi: anchor dimension mismatch");
  const int H = m_window.empty() ? 0 : m_window.front().shape.blocks;
  Vec x = closed_loop_product(sys, gains, t, t - h) * anchor;
  for (int i = 0; i <= H + h; ++i) {
    if (t - i < 0) break;  // pre-history noise is zero
    x += transfer_matrix_psi(sys, gains, m_window, t, i, h) * noises.at(t - i);
  }
  return x;
}

namespace {

void check_truncated_window(std::span<const BlockStack> m_window) {
  if (m_window.empty())
    throw std::invalid_argument("surrogate window must hold H+2 block stacks");
  const int H = m_window.front().shape.blocks;
  if (static_cast<int>(m_window.size()) != H + 2)
    throw std::invalid_argument("surrogate window must hold H+2 block stacks");
  for (const auto& m : m_window)
    if (!(m.shape == m_window.front().shape))
      throw std::invalid_argument("surrogate window has inconsistent shapes");
}

}  // namespace

Vec surrogate_state_y(const LtvSystem& sys, const MatSchedule& gains,
                      std::span<const BlockStack> m_window, const NoiseHistory& noises,
                      long t) {
  check_truncated_window(m_window);
  const int H = m_window.front().shape.blocks;
  const int d_x = sys.d_x();
  const long s = t - 1;  // y_t is a state reached at time index s+1

  // y_t = sum_{i=0..min(h,s)} Atilde_{K_{s:s-i+1}} w_{s-i}
  //     + sum_{j} Atilde_{K_{s:s-j+1}} B_{s-j} sum_k M_{s-j}[k] w_{s-j-k-1},
  // skipping every term whose noise index is negative.
  Vec y = Vec::Zero(d_x);
  if (s < 0) return y;

  Mat prefix = Mat::Identity(d_x, d_x);  // Atilde_{K_{s:s-i+1}} at i, reused for j
  for (int i = 0; i <= H && s - i >= 0; ++i) {
    if (i > 0) prefix *= sys.A.at(s - i + 1) - sys.B.at(s - i + 1) * gains.at(s - i + 1);
    y += prefix * noises.at(s - i);
  }
  prefix = Mat::Identity(d_x, d_x);
  for (int j = 0; j <= H && s - j >= 0; ++j) {
    if (j > 0) prefix *= sys.A.at(s - j + 1) - sys.B.at(s - j + 1) * gains.at(s - j + 1);
    // window index of M_{s-j}: the window covers M_{t-1-H} .. M_t
    const Mat pj = prefix * sys.B.at(s - j);
    const BlockStack& m = m_window[H - j];
    Vec inner = Vec::Zero(m.shape.rows);
    bool any = false;
    for (int k = 0; k < H; ++k) {
      const long idx = s - j - k - 1;
      if (idx < 0) break;
      inner += m.block(k) * noises.at(idx);
      any = true;
    }
    if (any) y += pj * inner;
  }
  return y;
}

Vec surrogate_action_v(const LtvSystem& sys, const MatSchedule& gains,
                       std::span<const BlockStack> m_window, const NoiseHistory& noises,
                       long t) {
  check_truncated_window(m_window);
  const int H = m_window.front().shape.blocks;
  const Vec y = surrogate_state_y(sys, gains, m_window, noises, t);
  Vec v = -gains.at(t) * y;
  const BlockStack& m_now = m_window[H + 1];
  for (int i = 1; i <= H; ++i) {
    if (t - i < 0) break;
    v += m_now.block(i - 1) * noises.at(t - i);
  }
  return v;
}

double truncated_loss(const CostFunction& cost, const LtvSystem& sys,
                      const MatSchedule& gains, std::span<const BlockStack> m_window,
                      const NoiseHistory& noises, long t) {
  const Vec y = surrogate_state_y(sys, gains, m_window, noises, t);
  Vec v = -gains.at(t) * y;
  const int H = m_window.front().shape.blocks;
  const BlockStack& m_now = m_window[H + 1];
  for (int i = 1; i <= H; ++i) {
    if (t - i < 0) break;
    v += m_now.block(i - 1) * noises.at(t - i);
  }
  return cost.value(t, y, v);
}

UnaryTruncatedLoss::UnaryTruncatedLoss(const LtvSystem& sys, const MatSchedule& gains,
                                       const CostFunction& cost, const NoiseHistory& noises,
                                       long t, int H)
    : cost_(&cost), t_(t), shape_{H, sys.d_u(), sys.d_x()}, k_now_(gains.at(t)) {
  if (H < 0) throw std::invalid_argument("UnaryTruncatedLoss: H must be nonnegative");
  const int d_x = sys.d_x();
  const long s = t - 1;

  alpha_ = Vec::Zero(d_x);
  Mat prefix = Mat::Identity(d_x, d_x);
  for (int i = 0; i <= H && s - i >= 0; ++i) {
    if (i > 0) prefix *= sys.A.at(s - i + 1) - sys.B.at(s - i + 1) * gains.at(s - i + 1);
    alpha_ += prefix * noises.at(s - i);
  }

  p_.reserve(H + 1);
  prefix = Mat::Identity(d_x, d_x);
  for (int j = 0; j <= H; ++j) {
    if (j > 0 && s - j + 1 >= 0)
      prefix *= sys.A.at(s - j + 1) - sys.B.at(s - j + 1) * gains.at(s - j + 1);
    p_.push_back(s - j >= 0 ? Mat(prefix * sys.B.at(s - j)) : Mat(Mat::Zero(d_x, shape_.rows)));
  }

  // noise slice w_{t-1-lag} for lag = 0 .. 2H; zero past the start of time
  w_back_.reserve(2 * H + 1);
  for (int lag = 0; lag <= 2 * H; ++lag)
    w_back_.push_back(s - lag >= 0 ? noises.at(s - lag) : Vec(Vec::Zero(d_x)));
}

const Vec& UnaryTruncatedLoss::noise_lag(long lag) const {
  return w_back_[static_cast<size_t>(lag)];
}

std::pair<Vec, Vec> UnaryTruncatedLoss::surrogate_pair(const Vec& m_flat) const {
  if (m_flat.size() != shape_.flat_size())
    throw std::invalid_argument("UnaryTruncatedLoss: decision size mismatch");
  const int H = shape_.blocks;
  Vec y = alpha_;
  for (int j = 0; j <= H; ++j) {
    Vec inner = Vec::Zero(shape_.rows);
    for (int k = 0; k < H; ++k)
      inner += block_view(m_flat, shape_, k) * noise_lag(j + k + 1);
    y += p_[j] * inner;
  }
  Vec v = -k_now_ * y;
  for (int k = 0; k < H; ++k) v += block_view(m_flat, shape_, k) * noise_lag(k);
  return {std::move(y), std::move(v)};
}

double UnaryTruncatedLoss::value(const Vec& m_flat) const {
  auto [y, v] = surrogate_pair(m_flat);
  return cost_->value(t_, y, v);
}

Vec UnaryTruncatedLoss::gradient(const Vec& m_flat) const {
  ++stats::counters().gradient_evals;
  auto [y, v] = surrogate_pair(m_flat);
  const Vec g_y = cost_->grad_x(t_, y, v);
  const Vec g_v = cost_->grad_u(t_, y, v);
  const Vec through_state = g_y - k_now_.transpose() * g_v;

  const int H = shape_.blocks;
  std::vector<Vec> a(H + 1);
  for (int j = 0; j <= H; ++j) a[j] = p_[j].transpose() * through_state;

  Vec grad = Vec::Zero(shape_.flat_size());
  for (int k = 0; k < H; ++k) {
    auto gk = block_view(grad, shape_, k);
    for (int j = 0; j <= H; ++j) gk += a[j] * noise_lag(j + k + 1).transpose();
    gk += g_v * noise_lag(k).transpose();
  }
  return grad;
}

Vec unary_truncated_gradient(const CostFunction& cost, const LtvSystem& sys,
                             const MatSchedule& gains, const NoiseHistory& noises, long t,
                             const Vec& m_flat, int H) {
  return UnaryTruncatedLoss(sys, gains, cost, noises, t, H).gradient(m_flat);
}

}  // namespace mofw
