#include <gtest/gtest.h>

#include <cmath>

#include "spide/errors.hpp"
#include "spide/levy_quadrature.hpp"

using namespace spide;

TEST(LevyNormalization, KnownValues) {
  // int (1 - cos y) dy / y^2 = pi, so c(1, 1) = 1 / pi.
  EXPECT_NEAR(levy_normalization(1.0, 1), 1.0 / kPi, 1e-15);
  EXPECT_NEAR(levy_normalization(1.0, 2), 1.0 / (2.0 * kPi), 1e-15);
}

TEST(LevyNormalization, PinsUnitSymbolByQuadrature) {
  // int (1 - cos(y)) c dy / |y|^{1+alpha} over R = 1, integrated by parts free of the singularity.
  for (double alpha : {0.5, 1.0, 1.5}) {
    double c = levy_normalization(alpha, 1);
    double s = 0.0;
    for (const auto& node : radial_rule(1e-8, 1e4, 256, 1.0))
      s += 2.0 * node.weight * (1.0 - std::cos(node.r)) * std::pow(node.r, -1.0 - alpha);
    double tail = 2.0 * std::pow(1e4, -alpha) / alpha;  // cosine averages out beyond 1e4
    EXPECT_NEAR(c * (s + tail), 1.0, 2e-4) << alpha;
  }
}

TEST(RadialRule, IntegratesPowersOnDecades) {
  auto rule = radial_rule(0.01, 100.0);
  double s = 0.0, s2 = 0.0;
  for (const auto& n : rule) {
    s += n.weight / n.r;
    s2 += n.weight * n.r * n.r;
  }
  EXPECT_NEAR(s, std::log(1e4), 1e-12);
  EXPECT_NEAR(s2, (1e6 - 1e-6) / 3.0, 1e-6);
  EXPECT_EQ(rule.size(), 4u * 64u);
}

TEST(RadialRule, SplitsWidePanelsForOscillation) {
  auto plain = radial_rule(1.0, 10.0);
  auto split = radial_rule(1.0, 10.0, 64, 20.0);
  EXPECT_GT(split.size(), plain.size());
  double s = 0.0;
  for (const auto& n : split) s += n.weight * std::cos(20.0 * n.r);
  EXPECT_NEAR(s, (std::sin(200.0) - std::sin(20.0)) / 20.0, 1e-12);
}

TEST(SphereRule, Weights) {
  double total = 0.0;
  for (const auto& d : sphere_rule(2, 64)) total += d.weight;
  EXPECT_NEAR(total, 2.0 * kPi, 1e-13);
  EXPECT_EQ(sphere_rule(1).size(), 2u);
}

TEST(LevyRule, TailMass) {
  for (int d : {1, 2}) {
    double alpha = 1.3, eps = 0.1, rmax = 50.0;
    double s = 0.0;
    for (const auto& n : levy_rule(alpha, d, eps, rmax)) s += n.weight;
    double area = d == 1 ? 2.0 : 2.0 * kPi;
    double expected = levy_normalization(alpha, d) * area * (std::pow(eps, -alpha) - std::pow(rmax, -alpha)) / alpha;
    EXPECT_NEAR(s, expected, 1e-10 * expected);
  }
  EXPECT_THROW(levy_rule(1.0, 1, 0.0, 1.0), ConfigError);
}
