#include "mofw/ltv.hpp"

#include <Eigen/SVD>

namespace mofw {

namespace {

double op_norm(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues().size() == 0 ? 0.0 : svd.singularValues()(0);
}

}  // namespace

LtvSystem::LtvSystem(long T, MatSchedule a, MatSchedule b, double ka, double kb, double w)
    : horizon(T), A(std::move(a)), B(std::move(b)), kappa_A(ka), kappa_B(kb), W(w) {
  if (T < 0) throw std::invalid_argument("LtvSystem: horizon must be nonnegative");
  if (!(ka > 0.0) || !(kb > 0.0) || !(w >= 0.0))
    throw std::invalid_argument("LtvSystem: bounds must be positive");
  const long steps = A.time_invariant() && B.time_invariant() ? 1 : horizon + 1;
  if (!A.time_invariant() && A.entries() < steps)
    throw std::invalid_argument("LtvSystem: A schedule shorter than horizon");
  if (!B.time_invariant() && B.entries() < steps)
    throw std::invalid_argument("LtvSystem: B schedule shorter than horizon");
  const int dx = static_cast<int>(A.at(0).rows());
  const int du = static_cast<int>(B.at(0).cols());
  for (long t = 0; t < steps; ++t) {
    const Mat& At = A.at(t);
    const Mat& Bt = B.at(t);
    if (At.rows() != dx || At.cols() != dx || Bt.rows() != dx || Bt.cols() != du)
      throw std::invalid_argument("LtvSystem: inconsistent matrix dimensions");
    if (op_norm(At) > kappa_A + 1e-9)
      throw std::invalid_argument("LtvSystem: ||A_t||_op exceeds the declared bound");
    if (op_norm(Bt) > kappa_B + 1e-9)
      throw std::invalid_argument("LtvSystem: ||B_t||_op exceeds the declared bound");
  }
}

Vec ltv_step(const LtvSystem& sys, long t, const Vec& x, const Vec& u, const Vec& w) {
  if (t < 0 || t > sys.horizon) throw std::out_of_range("ltv_step: t out of range");
  if (x.size() != sys.d_x() || u.size() != sys.d_u() || w.size() != sys.d_x())
    throw std::invalid_argument("ltv_step: dimension mismatch");
  return sys.A.at(t) * x + sys.B.at(t) * u + w;
}

Vec recover_noise(const LtvSystem& sys, long t, const Vec& x_t, const Vec& u_t,
                  const Vec& x_next) {
  if (t < 0 || t > sys.horizon) throw std::out_of_range("recover_noise: t out of range");
  if (x_t.size() != sys.d_x() || u_t.size() != sys.d_u() || x_next.size() != sys.d_x())
    throw std::invalid_argument("recover_noise: dimension mismatch");
  return x_next - sys.A.at(t) * x_t - sys.B.at(t) * u_t;
}

}  // namespace mofw
