#pragma once

#include <functional>
#include <string>
#include <vector>

#include "spide/spectral_grid.hpp"

namespace spide {

// Jump density evaluated at (t, y). Homogeneous densities depend on y / |y| only.
using Density = std::function<double(double t, const Point& y)>;

// Symmetric d x d matrix; a22 and a12 unused in d = 1.
struct SymMatrix {
  double a11 = 0.0;
  double a12 = 0.0;
  double a22 = 0.0;
};

// sigma^i(t), i = 1..d, each a vector of `modes` truncated cylindrical coordinates.
struct SigmaRows {
  std::vector<double> row1;
  std::vector<double> row2;
};

struct CoefficientSet {
  double alpha = 1.5;
  int dim = 1;
  Density m = [](double, const Point&) { return 1.0; };
  Density l = [](double, const Point&) { return 0.0; };
  Density m0 = [](double, const Point&) { return 1.0; };
  bool m_homogeneous = true;
  bool l_homogeneous = true;
  std::function<Point(double)> b = [](double) { return Point{0.0, 0.0}; };
  std::function<SymMatrix(double)> B = [](double) { return SymMatrix{}; };
  std::function<SigmaRows(double)> sigma;  // empty means sigma = 0
  int modes = 16;
  double lambda = 0.0;
  double K = 1.0;
  double delta = 1.0;
  double T = 1.0;
  bool time_homogeneous = true;
  std::string preset = "custom";

  bool has_jumps() const noexcept { return alpha < 2.0; }
  bool has_sigma() const { return static_cast<bool>(sigma); }
};

struct Violation {
  std::string clause;
  double t;
  Point point;
  double observed;
};

struct ValidationReport {
  bool passed = true;
  std::vector<Violation> violations;

  void add(Violation v) {
    violations.push_back(std::move(v));
    passed = false;
  }
};

struct SampleMesh {
  std::vector<double> times{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> radii{0.05, 0.3, 1.0, 3.0, 20.0};
  int directions = 64;  // unit-xi and unit-w samples in d = 2
};

ValidationReport validate_A0(const Density& m0, double alpha, int dim, double delta, double K,
                             const SampleMesh& mesh = {});
ValidationReport validate_A(const CoefficientSet& coeffs, const SampleMesh& mesh = {});

// Named coefficient presets: "fractional-laplacian", "kim-form",
// "half-sphere-degenerate", "heat". Throws ConfigError("preset", ...) otherwise.
CoefficientSet make_preset(const std::string& name, double alpha, int dim = 1);

}  // namespace spide
