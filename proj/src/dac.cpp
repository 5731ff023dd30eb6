#include "mofw/dac.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <complex>

namespace mofw {

DacPolicy::DacPolicy(int h, MatSchedule k, BlockStack m)
    : H(h), gains(std::move(k)), M(std::move(m)) {
  if (H < 1) throw std::invalid_argument("DacPolicy: H must be positive");
  if (M.shape.blocks != H) throw std::invalid_argument("DacPolicy: M must hold H blocks");
  const Mat& k0 = gains.at(0);
  if (M.shape.rows != k0.rows() || M.shape.cols != k0.cols())
    throw std::invalid_argument("DacPolicy: M blocks must match the gain shape");
}

Vec dac_action(const DacPolicy& policy, long t, const Vec& x, const NoiseHistory& noises) {
  const Mat& K = policy.gains.at(t);
  if (x.size() != K.cols()) throw std::invalid_argument("dac_action: state dimension mismatch");
  if (noises.dim() != K.cols())
    throw std::invalid_argument("dac_action: noise dimension mismatch");
  Vec u = -K * x;
  for (int i = 1; i <= policy.H; ++i) u += policy.M.block(i - 1) * noises.at(t - i);
  return u;
}

namespace {

double op_norm(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues().size() == 0 ? 0.0 : svd.singularValues()(0);
}

double op_norm_complex(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues().size() == 0 ? 0.0 : svd.singularValues()(0);
}

}  // namespace

StabilityWitness strong_stability_check(const Mat& A, const Mat& B, const Mat& K,
                                        double kappa, double gamma) {
  if (A.rows() != A.cols() || B.rows() != A.rows() || K.rows() != B.cols() ||
      K.cols() != A.cols())
    throw std::invalid_argument("strong_stability_check: incompatible dimensions");
  if (!(kappa > 0.0) || !(gamma > 0.0) || !(gamma <= 1.0))
    throw std::invalid_argument("strong_stability_check: need kappa > 0 and gamma in (0, 1]");

  const Mat closed = A - B * K;
  Eigen::EigenSolver<Mat> eig(closed);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("strong_stability_check: eigendecomposition failed");

  const Eigen::MatrixXcd Q = eig.eigenvectors();
  const Eigen::VectorXcd lambda = eig.eigenvalues();

  Eigen::FullPivLU<Eigen::MatrixXcd> lu(Q);
  if (!lu.isInvertible())
    throw std::runtime_error(
        "strong_stability_check: closed loop has no diagonalizing witness");
  const Eigen::MatrixXcd Q_inv = lu.inverse();

  StabilityWitness w;
  w.contraction = lambda.cwiseAbs().maxCoeff();
  w.gain_norm = op_norm(K);
  w.basis_norm = op_norm_complex(Q);
  w.basis_inverse_norm = op_norm_complex(Q_inv);
  w.reconstruction_error =
      (Q * lambda.asDiagonal() * Q_inv - closed.cast<std::complex<double>>()).norm();
  if (w.reconstruction_error > 1e-8)
    throw std::runtime_error(
        "strong_stability_check: closed loop has no diagonalizing witness");

  const double slack = 1e-9;
  w.stable = w.contraction <= 1.0 - gamma + slack && w.gain_norm <= kappa + slack &&
             w.basis_norm <= kappa + slack && w.basis_inverse_norm <= kappa + slack;
  return w;
}

std::vector<BlockStack> dac_comparator_from_gains(const LtvSystem& sys,
                                                  const MatSchedule& gains,
                                                  const MatSchedule& gains_star, int H,
                                                  long T, double kappa, double gamma) {
  if (H < 1 || T < 0) throw std::invalid_argument("dac_comparator_from_gains: bad H or T");
  const int d_u = sys.d_u();
  const int d_x = sys.d_x();
  const BlockShape shape{H, d_u, d_x};

  const long star_steps = gains_star.time_invariant() ? 1 : T + 1;
  for (long t = 0; t < star_steps; ++t) {
    const auto witness = strong_stability_check(sys.A.at(std::min(t, sys.horizon)),
                                                sys.B.at(std::min(t, sys.horizon)),
                                                gains_star.at(t), kappa, gamma);
    if (!witness.stable)
      throw std::invalid_argument(
          "dac_comparator_from_gains: comparator gain is not strongly stable");
  }

  std::vector<BlockStack> comparator;
  comparator.reserve(T + 1);
  for (long t = 0; t <= T; ++t) {
    BlockStack m = BlockStack::zero(shape);
    const Mat diff = gains.at(t) - gains_star.at(t);
    Mat closed_prod = Mat::Identity(d_x, d_x);  // prod over tau = t-1 .. t-i
    for (int i = 0; i < H; ++i) {
      if (i > 0) {
        const long tau = t - i;
        if (tau >= 0) {
          closed_prod *= sys.A.at(tau) - sys.B.at(tau) * gains_star.at(tau);
        } else {
          closed_prod.setZero();  // pre-history noises vanish, block is unconstrained
        }
      }
      m.block(i) = diff * closed_prod;
      const double bound = 2.0 * kappa * kappa * kappa * std::pow(1.0 - gamma, i);
      if (op_norm(m.block(i)) > bound + 1e-9)
        throw std::runtime_error(
            "dac_comparator_from_gains: comparator block exceeds its norm bound");
    }
    comparator.push_back(std::move(m));
  }
  return comparator;
}

}  // namespace mofw
