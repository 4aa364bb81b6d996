#pragma once

#include <vector>

#include "spide/spectral_grid.hpp"

namespace spide {

// c(alpha, d) such that the jump integral with m = 1 against
// c |y|^{-d-alpha} dy is exactly -|xi|^alpha.
double levy_normalization(double alpha, int dim);

struct Direction {
  Point w;
  double weight;
};

// d=1: w = -1, +1 with unit weights. d=2: trapezoid rule on the circle.
std::vector<Direction> sphere_rule(int dim, int angular_nodes = 64);

// d=2: Gauss-Legendre on the four quarter arcs between xi and the directions
// orthogonal to it, graded toward the orthogonal directions where
// |(w, xi)|^alpha has its kink. `panels` 8-node panels per quarter arc.
// d=1 or xi = 0: same as sphere_rule.
std::vector<Direction> aligned_sphere_rule(int dim, const Point& xi, int panels = 4);

struct RadialNode {
  double r;
  double weight;  // weight for dr
};

// Gauss-Legendre panels on [a, b]: panels are 1/8 decade wide in log r and
// aligned to powers of ten (so r = 1 is always a breakpoint), 8 nodes each,
// i.e. 64 nodes per decade at the default density. When `max_wavenumber` > 0
// a panel wider than pi / max_wavenumber is split into equal linear pieces.
std::vector<RadialNode> radial_rule(double a, double b, int nodes_per_decade = 64, double max_wavenumber = 0.0);

struct LevyNode {
  Point y;
  double weight;  // includes c(alpha, d) |y|^{-d-alpha} and the polar Jacobian
};

// Nodes for int_{eps < |y| < r_max} F(y) c(alpha,d) dy / |y|^{d+alpha}.
std::vector<LevyNode> levy_rule(double alpha, int dim, double eps, double r_max, int nodes_per_decade = 64,
                                int angular_nodes = 64);

}  // namespace spide
