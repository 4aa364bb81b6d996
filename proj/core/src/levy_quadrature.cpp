#include "spide/levy_quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>

#include "spide/errors.hpp"

namespace spide {

double levy_normalization(double alpha, int dim) {
  double d = dim;
  return alpha * std::pow(2.0, alpha - 1.0) * std::tgamma(0.5 * (d + alpha)) /
         (std::pow(kPi, 0.5 * d) * std::tgamma(1.0 - 0.5 * alpha));
}

std::vector<Direction> sphere_rule(int dim, int angular_nodes) {
  if (dim == 1) return {{{-1.0, 0.0}, 1.0}, {{1.0, 0.0}, 1.0}};
  std::vector<Direction> out;
  out.reserve(static_cast<std::size_t>(angular_nodes));
  double dtheta = 2.0 * kPi / angular_nodes;
  for (int k = 0; k < angular_nodes; ++k) {
    double theta = dtheta * k;
    out.push_back({{std::cos(theta), std::sin(theta)}, dtheta});
  }
  return out;
}

std::vector<Direction> aligned_sphere_rule(int dim, const Point& xi, int panels) {
  if (dim == 1 || (xi[0] == 0.0 && xi[1] == 0.0)) return sphere_rule(dim);
  using Rule = boost::math::quadrature::gauss<double, 8>;
  const auto& xs = Rule::abscissa();
  const auto& ws = Rule::weights();
  panels = std::max(1, panels);
  std::vector<std::pair<double, double>> graded;  // (s, weight), s = distance to the kink
  double width = 1.0 / panels;
  for (int k = 0; k < panels; ++k) {
    double mid = (k + 0.5) * width;
    double half = 0.5 * width;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      for (double sign : {-1.0, 1.0}) {
        if (xs[i] == 0.0 && sign > 0.0) continue;
        double v = mid + sign * half * xs[i];
        double v2 = v * v;
        // s = (pi/2) v^4
        graded.emplace_back(0.5 * kPi * v2 * v2, half * ws[i] * 2.0 * kPi * v2 * v);
      }
    }
  }
  double phi = std::atan2(xi[1], xi[0]);
  std::vector<Direction> out;
  out.reserve(4 * graded.size());
  for (double kink : {0.5 * kPi, 1.5 * kPi})
    for (double side : {-1.0, 1.0})
      for (const auto& [s, w] : graded) {
        double theta = phi + kink + side * s;
        out.push_back({{std::cos(theta), std::sin(theta)}, w});
      }
  return out;
}

std::vector<RadialNode> radial_rule(double a, double b, int nodes_per_decade, double max_wavenumber) {
  std::vector<RadialNode> out;
  if (!(b > a) || !(a > 0.0)) return out;
  using Rule = boost::math::quadrature::gauss<double, 8>;
  const auto& xs = Rule::abscissa();
  const auto& ws = Rule::weights();
  int panels_per_decade = std::max(1, nodes_per_decade / 8);
  double step = 1.0 / panels_per_decade;

  auto add_panel = [&](double lo, double hi) {
    double mid = 0.5 * (lo + hi);
    double half = 0.5 * (hi - lo);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (xs[i] == 0.0) {
        out.push_back({mid, half * ws[i]});
        continue;
      }
      out.push_back({mid - half * xs[i], half * ws[i]});
      out.push_back({mid + half * xs[i], half * ws[i]});
    }
  };

  double la = std::log10(a);
  double lb = std::log10(b);
  double k0 = std::floor(la / step);
  for (double k = k0;; k += 1.0) {
    double lo = std::max(a, std::pow(10.0, k * step));
    double hi = std::min(b, std::pow(10.0, (k + 1.0) * step));
    if (hi > lo) {
      int pieces = 1;
      if (max_wavenumber > 0.0) pieces = std::max(1, static_cast<int>(std::ceil((hi - lo) * max_wavenumber / kPi)));
      double w = (hi - lo) / pieces;
      for (int p = 0; p < pieces; ++p) add_panel(lo + p * w, p + 1 == pieces ? hi : lo + (p + 1) * w);
    }
    if ((k + 1.0) * step >= lb) break;
  }
  return out;
}

std::vector<LevyNode> levy_rule(double alpha, int dim, double eps, double r_max, int nodes_per_decade,
                                int angular_nodes) {
  if (!(eps > 0.0) || !(r_max > eps)) throw ConfigError("eps", "need 0 < eps < r_max");
  double c = levy_normalization(alpha, dim);
  auto radial = radial_rule(eps, r_max, nodes_per_decade);
  std::vector<LevyNode> out;
  for (const auto& dir : sphere_rule(dim, angular_nodes)) {
    for (const auto& node : radial) {
      double w = c * dir.weight * node.weight * std::pow(node.r, -1.0 - alpha);
      out.push_back({{dir.w[0] * node.r, dir.w[1] * node.r}, w});
    }
  }
  return out;
}

}  // namespace spide
