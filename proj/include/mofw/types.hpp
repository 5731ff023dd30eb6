#pragma once

#include <Eigen/Core>

#include <stdexcept>

namespace mofw {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Layout of a stack of H equally shaped matrix blocks flattened into one
// vector: block i occupies entries [i*rows*cols, (i+1)*rows*cols), each
// block stored column-major.
struct BlockShape {
  int blocks = 0;
  int rows = 0;
  int cols = 0;

  int block_size() const { return rows * cols; }
  int flat_size() const { return blocks * rows * cols; }

  bool operator==(const BlockShape&) const = default;
};

inline Eigen::Map<const Mat> block_view(const Vec& v, const BlockShape& s, int i) {
  if (i < 0 || i >= s.blocks || v.size() != s.flat_size())
    throw std::invalid_argument("block_view: index or size mismatch");
  return {v.data() + static_cast<long>(i) * s.block_size(), s.rows, s.cols};
}

inline Eigen::Map<Mat> block_view(Vec& v, const BlockShape& s, int i) {
  if (i < 0 || i >= s.blocks || v.size() != s.flat_size())
    throw std::invalid_argument("block_view: index or size mismatch");
  return {v.data() + static_cast<long>(i) * s.block_size(), s.rows, s.cols};
}

// A block-matrix decision M = (M[0], ..., M[H-1]) stored flat, so that the
// learner algebra (inner products, norms, convex combinations) is plain
// vector arithmetic and the Frobenius geometry is the Euclidean one.
struct BlockStack {
  BlockShape shape;
  Vec flat;

  BlockStack() = default;
  BlockStack(const BlockShape& s, Vec data) : shape(s), flat(std::move(data)) {
    if (flat.size() != shape.flat_size())
      throw std::invalid_argument("BlockStack: data size does not match shape");
  }
  static BlockStack zero(const BlockShape& s) { return {s, Vec::Zero(s.flat_size())}; }

  Eigen::Map<const Mat> block(int i) const { return block_view(flat, shape, i); }
  Eigen::Map<Mat> block(int i) { return block_view(flat, shape, i); }
};

inline void require_finite(const Vec& v, const char* what) {
  if (!v.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite entries");
}

inline void require_same_size(const Vec& a, const Vec& b, const char* what) {
  if (a.size() != b.size()) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

}  // namespace mofw
