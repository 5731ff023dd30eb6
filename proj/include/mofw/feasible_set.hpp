#pragma once

#include <variant>

#include "mofw/types.hpp"

namespace mofw {

// Axis-aligned box {x : lower <= x <= upper}.
struct Box {
  Vec lower;
  Vec upper;
  Box(Vec lo, Vec hi);
};

// Euclidean ball of given center and radius.
struct Ball {
  Vec center;
  double radius;
  Ball(Vec c, double r);
};

// Probability simplex {x >= 0, sum x = 1} in R^dim.
struct Simplex {
  int dim;
  explicit Simplex(int d);
};

// Product of operator-norm balls over a stack of matrix blocks:
// {M : ||M[i]||_op <= radii[i] for each block i}, with Frobenius geometry
// on the flattened representation.
struct BlockOpNormBall {
  BlockShape shape;
  Vec radii;
  BlockOpNormBall(BlockShape s, Vec r);
};

using FeasibleSet = std::variant<Box, Ball, Simplex, BlockOpNormBall>;

// Constraint set of a disturbance-action controller with horizon H:
// block i is an operator-norm ball of radius kappa_B * kappa^3 * (1-gamma)^i.
FeasibleSet dac_constraint_set(int H, int d_u, int d_x, double kappa_B, double kappa,
                               double gamma);

// Ambient dimension of the flattened decision vector.
int dim(const FeasibleSet& set);

// argmin_{v in set} <g, v>.  Ties on zero gradient coordinates resolve to a
// fixed vertex (box lower bound, first simplex vertex, ball center, zero
// block) so runs are reproducible.
Vec lmo(const FeasibleSet& set, const Vec& g);

// Euclidean (Frobenius) nearest point of the set.
Vec project(const FeasibleSet& set, const Vec& x);

// Euclidean diameter: exact for box/ball/simplex, and the upper bound
// 2*sqrt(sum_i min(rows,cols)*r_i^2) for the block operator-norm ball.
double diameter(const FeasibleSet& set);

// Membership within absolute slack `tol` on every constraint.
bool contains(const FeasibleSet& set, const Vec& x, double tol);

// A deterministic feasible starting point: box midpoint, ball center,
// simplex barycenter, zero block stack.
Vec initial_point(const FeasibleSet& set);

}  // namespace mofw
