#include "mofw/feasible_set.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mofw/instrumentation.hpp"

namespace mofw {

Box::Box(Vec lo, Vec hi) : lower(std::move(lo)), upper(std::move(hi)) {
  require_same_size(lower, upper, "Box");
  require_finite(lower, "Box lower");
  require_finite(upper, "Box upper");
  if ((lower.array() > upper.array()).any())
    throw std::invalid_argument("Box: lower must not exceed upper");
}

Ball::Ball(Vec c, double r) : center(std::move(c)), radius(r) {
  require_finite(center, "Ball center");
  if (!(radius >= 0.0) || !std::isfinite(radius))
    throw std::invalid_argument("Ball: radius must be nonnegative and finite");
}

Simplex::Simplex(int d) : dim(d) {
  if (d < 1) throw std::invalid_argument("Simplex: dim must be positive");
}

BlockOpNormBall::BlockOpNormBall(BlockShape s, Vec r) : shape(s), radii(std::move(r)) {
  if (shape.blocks < 1 || shape.rows < 1 || shape.cols < 1)
    throw std::invalid_argument("BlockOpNormBall: shape entries must be positive");
  if (radii.size() != shape.blocks)
    throw std::invalid_argument("BlockOpNormBall: one radius per block required");
  require_finite(radii, "BlockOpNormBall radii");
  if ((radii.array() < 0.0).any())
    throw std::invalid_argument("BlockOpNormBall: radii must be nonnegative");
}

FeasibleSet dac_constraint_set(int H, int d_u, int d_x, double kappa_B, double kappa,
                               double gamma) {
  if (H < 1) throw std::invalid_argument("dac_constraint_set: H must be positive");
  Vec radii(H);
  const double scale = kappa_B * kappa * kappa * kappa;
  for (int i = 0; i < H; ++i) radii[i] = scale * std::pow(1.0 - gamma, i);
  return BlockOpNormBall{BlockShape{H, d_u, d_x}, std::move(radii)};
}

int dim(const FeasibleSet& set) {
  return std::visit(
      [](const auto& s) -> int {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) return static_cast<int>(s.lower.size());
        else if constexpr (std::is_same_v<T, Ball>) return static_cast<int>(s.center.size());
        else if constexpr (std::is_same_v<T, Simplex>) return s.dim;
        else return s.shape.flat_size();
      },
      set);
}

namespace {

void check_input(const FeasibleSet& set, const Vec& v, const char* what) {
  if (v.size() != dim(set)) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  require_finite(v, what);
}

Vec lmo_impl(const Box& s, const Vec& g) {
  Vec v(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i)
    v[i] = g[i] < 0.0 ? s.upper[i] : s.lower[i];  // zero ties pick the lower bound
  return v;
}

Vec lmo_impl(const Ball& s, const Vec& g) {
  const double norm = g.norm();
  if (norm == 0.0) return s.center;
  return s.center - (s.radius / norm) * g;
}

Vec lmo_impl(const Simplex& s, const Vec& g) {
  Eigen::Index j = 0;
  for (Eigen::Index i = 1; i < g.size(); ++i)
    if (g[i] < g[j]) j = i;
  Vec v = Vec::Zero(s.dim);
  v[j] = 1.0;
  return v;
}

Vec lmo_impl(const BlockOpNormBall& s, const Vec& g) {
  Vec v = Vec::Zero(g.size());
  for (int i = 0; i < s.shape.blocks; ++i) {
    auto gb = block_view(g, s.shape, i);
    if (gb.norm() == 0.0) continue;  // zero block maps to the zero matrix
    Eigen::JacobiSVD<Mat> svd(gb, Eigen::ComputeThinU | Eigen::ComputeThinV);
    block_view(v, s.shape, i) = -s.radii[i] * (svd.matrixU() * svd.matrixV().transpose());
  }
  return v;
}

Vec project_impl(const Box& s, const Vec& x) {
  return x.cwiseMax(s.lower).cwiseMin(s.upper);
}

Vec project_impl(const Ball& s, const Vec& x) {
  const Vec d = x - s.center;
  const double norm = d.norm();
  if (norm <= s.radius) return x;
  return s.center + (s.radius / norm) * d;
}

// Sorted-threshold projection onto the probability simplex.
Vec project_impl(const Simplex&, const Vec& x) {
  std::vector<double> u(x.data(), x.data() + x.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (int j = 0; j < static_cast<int>(u.size()); ++j) {
    cumsum += u[j];
    const double candidate = (cumsum - 1.0) / (j + 1);
    if (u[j] - candidate > 0.0) theta = candidate;
  }
  return (x.array() - theta).cwiseMax(0.0).matrix();
}

Vec project_impl(const BlockOpNormBall& s, const Vec& x) {
  Vec v(x.size());
  for (int i = 0; i < s.shape.blocks; ++i) {
    auto xb = block_view(x, s.shape, i);
    Eigen::JacobiSVD<Mat> svd(xb, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.singularValues().size() == 0 || svd.singularValues()(0) <= s.radii[i]) {
      block_view(v, s.shape, i) = xb;
      continue;
    }
    const Vec clipped = svd.singularValues().cwiseMin(s.radii[i]);
    block_view(v, s.shape, i) =
        svd.matrixU() * clipped.asDiagonal() * svd.matrixV().transpose();
  }
  return v;
}

double op_norm(const Eigen::Map<const Mat>& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues().size() == 0 ? 0.0 : svd.singularValues()(0);
}

}  // namespace

Vec lmo(const FeasibleSet& set, const Vec& g) {
  check_input(set, g, "lmo");
  ++stats::counters().lmo_calls;
  return std::visit([&](const auto& s) { return lmo_impl(s, g); }, set);
}

Vec project(const FeasibleSet& set, const Vec& x) {
  check_input(set, x, "project");
  ++stats::counters().projections;
  return std::visit([&](const auto& s) { return project_impl(s, x); }, set);
}

double diameter(const FeasibleSet& set) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
          return (s.upper - s.lower).norm();
        } else if constexpr (std::is_same_v<T, Ball>) {
          return 2.0 * s.radius;
        } else if constexpr (std::is_same_v<T, Simplex>) {
          return s.dim > 1 ? std::sqrt(2.0) : 0.0;
        } else {
          const double d = std::min(s.shape.rows, s.shape.cols);
          return 2.0 * std::sqrt(d * s.radii.squaredNorm());
        }
      },
      set);
}

bool contains(const FeasibleSet& set, const Vec& x, double tol) {
  if (tol < 0.0) throw std::invalid_argument("contains: tol must be nonnegative");
  if (x.size() != dim(set)) throw std::invalid_argument("contains: dimension mismatch");
  if (!x.allFinite()) return false;
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
          return (x.array() >= s.lower.array() - tol).all() &&
                 (x.array() <= s.upper.array() + tol).all();
        } else if constexpr (std::is_same_v<T, Ball>) {
          return (x - s.center).norm() <= s.radius + tol;
        } else if constexpr (std::is_same_v<T, Simplex>) {
          return (x.array() >= -tol).all() && std::abs(x.sum() - 1.0) <= tol;
        } else {
          for (int i = 0; i < s.shape.blocks; ++i)
            if (op_norm(block_view(x, s.shape, i)) > s.radii[i] + tol) return false;
          return true;
        }
      },
      set);
}

Vec initial_point(const FeasibleSet& set) {
  return std::visit(
      [](const auto& s) -> Vec {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
          return 0.5 * (s.lower + s.upper);
        } else if constexpr (std::is_same_v<T, Ball>) {
          return s.center;
        } else if constexpr (std::is_same_v<T, Simplex>) {
          return Vec::Constant(s.dim, 1.0 / s.dim);
        } else {
          return Vec::Zero(s.shape.flat_size());
        }
      },
      set);
}

}  // namespace mofw
