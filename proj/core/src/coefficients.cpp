#include "spide/coefficients.hpp"

#include <algorithm>
#include <cmath>

#include "spide/errors.hpp"
#include "spide/levy_quadrature.hpp"

namespace spide {

namespace {

template <class Fn>
double evaluate(const char* what, Fn&& fn, double t, const Point& y) {
  try {
    return fn(t, y);
  } catch (const std::exception& e) {
    throw EvaluationError(std::string(what) + " failed at t=" + std::to_string(t) + ", y=(" + std::to_string(y[0]) +
                          ", " + std::to_string(y[1]) + "): " + e.what());
  }
}

std::vector<Point> unit_samples(int dim, int directions) {
  std::vector<Point> out;
  for (const auto& d : sphere_rule(dim, directions)) out.push_back(d.w);
  return out;
}

double sigma_norm(const std::vector<double>& row) {
  double s = 0.0;
  for (double v : row) s += v * v;
  return std::sqrt(s);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

ValidationReport validate_A0(const Density& m0, double alpha, int dim, double delta, double K, const SampleMesh& mesh) {
  ValidationReport report;
  if (!(alpha > 0.0 && alpha < 2.0)) throw ConfigError("alpha", "A0 applies to alpha in (0, 2)");
  auto dirs = sphere_rule(dim, mesh.directions);
  for (double t : mesh.times) {
    for (const auto& dir : dirs) {
      for (double r : mesh.radii) {
        Point y{dir.w[0] * r, dir.w[1] * r};
        double v = evaluate("m0", m0, t, y);
        if (v < 0.0 || v > K) report.add({"A0(i) bound", t, y, v});
        for (double c : {0.5, 2.0}) {
          double vc = evaluate("m0", m0, t, Point{c * y[0], c * y[1]});
          if (std::abs(vc - v) > 1e-12 * std::max(1.0, K)) report.add({"A0(i) homogeneity", t, y, vc - v});
        }
      }
    }
    if (alpha == 1.0) {
      Point moment{0.0, 0.0};
      for (const auto& dir : dirs) {
        double v = evaluate("m0", m0, t, dir.w);
        moment[0] += dir.weight * dir.w[0] * v;
        moment[1] += dir.weight * dir.w[1] * v;
      }
      double size = std::hypot(moment[0], moment[1]);
      if (size > 1e-10 * std::max(1.0, K)) report.add({"A0(ii) odd moment", t, moment, size});
    }
    double worst = INFINITY;
    Point worst_xi{};
    for (const auto& xi : unit_samples(dim, mesh.directions)) {
      double s = 0.0;
      for (const auto& dir : dirs)
        s += dir.weight * std::pow(std::abs(dir.w[0] * xi[0] + dir.w[1] * xi[1]), alpha) * evaluate("m0", m0, t, dir.w);
      if (s < worst) {
        worst = s;
        worst_xi = xi;
      }
    }
    if (worst < delta) report.add({"A0(iii) nondegeneracy", t, worst_xi, worst});
  }
  return report;
}

ValidationReport validate_A(const CoefficientSet& c, const SampleMesh& mesh) {
  ValidationReport report;
  if (!(c.alpha > 0.0 && c.alpha <= 2.0)) throw ConfigError("alpha", "order must lie in (0, 2]");
  if (c.dim != 1 && c.dim != 2) throw ConfigError("d", "dimension must be 1 or 2");
  if (c.lambda < 0.0) throw ConfigError("lambda", "damping must be nonnegative");
  if (!(c.delta > 0.0)) throw ConfigError("delta", "ellipticity constant must be positive");
  auto dirs = sphere_rule(c.dim, mesh.directions);
  bool jumps = c.has_jumps();

  for (double t : mesh.times) {
    Point b = c.b(t);
    SymMatrix B = c.B(t);
    double bmax = std::max(std::abs(b[0]), c.dim == 2 ? std::abs(b[1]) : 0.0);
    double Bmax = std::max({std::abs(B.a11), c.dim == 2 ? std::abs(B.a12) : 0.0, c.dim == 2 ? std::abs(B.a22) : 0.0});
    double smax = 0.0;
    SigmaRows sig;
    if (c.has_sigma()) {
      sig = c.sigma(t);
      smax = std::max(sigma_norm(sig.row1), c.dim == 2 ? sigma_norm(sig.row2) : 0.0);
    }
    double fixed = bmax + Bmax + smax;
    if (fixed > c.K) report.add({"A(ii) bound", t, b, fixed});

    if (jumps) {
      for (const auto& dir : dirs) {
        for (double r : mesh.radii) {
          Point y{dir.w[0] * r, dir.w[1] * r};
          double m = evaluate("m", c.m, t, y);
          double l = evaluate("l", c.l, t, y);
          double m0 = evaluate("m0", c.m0, t, y);
          if (m < 0.0 || l < 0.0) report.add({"A(i) sign", t, y, std::min(m, l)});
          if (m + l + fixed > c.K) report.add({"A(ii) bound", t, y, m + l + fixed});
          if (m - l < m0 - 1e-14) report.add({"A(iii) superparabolicity", t, y, m - l - m0});
        }
      }
      if (c.alpha == 1.0) {
        const std::pair<double, double> annuli[] = {{0.1, 1.0}, {1.0, 10.0}, {0.5, 2.0}};
        for (auto [lo, hi] : annuli) {
          Point moment{0.0, 0.0};
          auto radial = radial_rule(lo, hi);
          for (const auto& dir : dirs)
            for (const auto& node : radial) {
              Point y{dir.w[0] * node.r, dir.w[1] * node.r};
              double w = dir.weight * node.weight / node.r * evaluate("m", c.m, t, y);
              moment[0] += w * dir.w[0];
              moment[1] += w * dir.w[1];
            }
          double size = std::hypot(moment[0], moment[1]);
          if (size > 1e-9 * std::max(1.0, c.K)) report.add({"A(ii) drift cancellation", t, {lo, hi}, size});
        }
      }
    } else {
      double s11 = 0.0, s12 = 0.0, s22 = 0.0;
      if (c.has_sigma()) {
        s11 = dot(sig.row1, sig.row1);
        s12 = dot(sig.row1, sig.row2);
        s22 = dot(sig.row2, sig.row2);
      }
      double a = B.a11 - 0.5 * s11;
      double smallest = a;
      if (c.dim == 2) {
        double off = B.a12 - 0.5 * s12;
        double d = B.a22 - 0.5 * s22;
        smallest = 0.5 * (a + d) - std::sqrt(0.25 * (a - d) * (a - d) + off * off);
      }
      if (smallest < c.delta - 1e-12) report.add({"A(iii) superparabolicity", t, {}, smallest});
    }
  }
  if (jumps) {
    auto a0 = validate_A0(c.m0, c.alpha, c.dim, c.delta, c.K, mesh);
    for (auto& v : a0.violations) report.add(std::move(v));
  }
  return report;
}

CoefficientSet make_preset(const std::string& name, double alpha, int dim) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw ConfigError("alpha", "order must lie in (0, 2]");
  if (dim != 1 && dim != 2) throw ConfigError("d", "dimension must be 1 or 2");
  CoefficientSet c;
  c.alpha = alpha;
  c.dim = dim;
  c.preset = name;
  auto one = [](double, const Point&) { return 1.0; };
  auto zero = [](double, const Point&) { return 0.0; };
  c.l = zero;
  if (name == "fractional-laplacian") {
    c.m = one;
    c.m0 = one;
    c.K = 1.0;
    c.delta = 1.0;
    if (alpha == 2.0) {
      c.B = [](double) { return SymMatrix{2.0, 0.0, 2.0}; };
      c.K = 2.0;
      c.delta = 2.0;
    }
  } else if (name == "kim-form") {
    if (alpha == 2.0) throw ConfigError("preset", "kim-form needs alpha in (0, 2)");
    c.m = [T = c.T](double t, const Point&) { return 1.0 + 0.5 * std::sin(2.0 * kPi * t / T); };
    c.m0 = [](double, const Point&) { return 0.5; };
    c.K = 1.5;
    c.delta = 0.5;
    c.time_homogeneous = false;
  } else if (name == "half-sphere-degenerate") {
    if (alpha == 2.0) throw ConfigError("preset", "half-sphere-degenerate needs alpha in (0, 2)");
    Density profile;
    if (alpha == 1.0) {
      if (dim == 1) throw ConfigError("preset", "half-sphere-degenerate at alpha = 1 needs d = 2");
      // Double cone |w1| > |w2|: vanishes on half the circle, odd moment cancels.
      profile = [](double, const Point& y) { return std::abs(y[0]) > std::abs(y[1]) * (1.0 + 1e-9) ? 1.0 : 0.0; };
    } else {
      profile = [](double, const Point& y) { return y[0] > 0.0 ? 1.0 : 0.0; };
    }
    c.m = profile;
    c.m0 = profile;
    c.K = 1.0;
    c.delta = dim == 1 ? 1.0 : 0.5;
  } else if (name == "heat") {
    c.alpha = 2.0;
    c.delta = 1.0;
    c.B = [](double) { return SymMatrix{1.0, 0.0, 1.0}; };
    c.K = 1.0;
  } else {
    throw ConfigError("preset", "unknown coefficient preset '" + name + "'");
  }
  return c;
}

}  // namespace spide
