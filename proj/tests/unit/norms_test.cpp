#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "spide/errors.hpp"
#include "spide/levy_quadrature.hpp"
#include "spide/norms.hpp"
#include "spide/spectral_grid.hpp"

using namespace spide;

namespace {

Field random_smooth(const SpectralGrid& grid, unsigned seed, int band = 6) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Field spec(grid, Domain::spectral);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Point xi = grid.wave_vector(i);
    double k = std::hypot(xi[0], xi[1]) * grid.half_width() / kPi;
    if (k < band) spec[i] = cplx(gauss(rng), gauss(rng)) / (1.0 + k * k);
  }
  return inverse(spec);
}

FieldSeries constant_series(const Field& f, int steps, double horizon) {
  FieldSeries s{f.grid(), {}, {}};
  for (int k = 0; k <= steps; ++k) {
    s.times.push_back(horizon * k / steps);
    s.slices.push_back(f);
  }
  return s;
}

}  // namespace

TEST(Sobolev, ParsevalAtPTwo) {
  auto g = make_grid(2, 32, 3.0);
  Field u = random_smooth(g, 1);
  Field s = forward(u);
  double beta = 1.3;
  double direct = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.is_nyquist(i)) continue;
    Point xi = g.wave_vector(i);
    direct += std::pow(1.0 + xi[0] * xi[0] + xi[1] * xi[1], beta) * std::norm(s[i]) / g.box_volume();
  }
  EXPECT_NEAR(sobolev_norm(u, beta, 2.0).value, std::sqrt(direct), 1e-10 * std::sqrt(direct));
}

TEST(Sobolev, ZeroOrderIsLp) {
  auto g = make_grid(1, 64, 4.0);
  Field u = random_smooth(g, 2);
  for (double p : {1.0, 2.0, 3.5})
    EXPECT_NEAR(sobolev_norm(u, 0.0, p).value, lattice_lp(u, p), 1e-12 * lattice_lp(u, p));
}

TEST(Sobolev, SingleTone) {
  for (int d : {1, 2}) {
    auto g = make_grid(d, 16, kPi);
    cplx a(0.3, -1.1);
    Field tone = Field::sample(g, [&](const Point& x) { return a * std::polar(1.0, 2.0 * x[0]); });
    double expected = std::abs(a) * std::sqrt(5.0) * std::pow(2.0 * kPi, 0.5 * d);
    EXPECT_NEAR(sobolev_norm(tone, 1.0, 2.0).value, expected, 1e-10 * expected);
  }
}

TEST(Besov, ZeroAndToneBlocks) {
  auto g = make_grid(1, 256, kPi);
  EXPECT_EQ(besov_norm(Field(g), 1.0, 2.0).value, 0.0);
  LPFilterBank bank(g);
  Field tone = Field::sample(g, [](const Point& x) { return std::polar(1.0, 8.0 * x[0]); });
  for (int j = 0; j <= bank.max_level(); ++j) {
    double block = lattice_lp(bank.block(tone, j), 2.0);
    if (j < 2 || j > 4) EXPECT_LT(block, 1e-12) << "level " << j;
  }
}

TEST(Besov, EqualsSquareFunctionAtPTwo) {
  auto g = make_grid(2, 32, 4.0);
  for (unsigned seed = 0; seed < 5; ++seed) {
    Field u = random_smooth(g, seed + 10);
    double a = besov_norm(u, 0.8, 2.0).value;
    double b = equivalent_H_norm(u, 0.8, 2.0).value;
    EXPECT_NEAR(a, b, 1e-10 * a);
  }
}

TEST(Besov, SobolevRatioStaysBounded) {
  auto g = make_grid(1, 128, 8.0);
  double lo = 1e300, hi = 0.0;
  for (unsigned seed = 0; seed < 50; ++seed) {
    Field u = random_smooth(g, seed + 100, 30);
    double r = besov_norm(u, 1.0, 2.0).value / sobolev_norm(u, 1.0, 2.0).value;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  RecordProperty("ratio_min", std::to_string(lo));
  RecordProperty("ratio_max", std::to_string(hi));
  EXPECT_GT(lo, 0.1);
  EXPECT_LT(hi, 10.0);
}

TEST(EquivalentH, SingleBlockReduction) {
  auto g = make_grid(1, 256, kPi);
  // |xi| = 8 sits where only level 3 is active.
  Field tone = Field::sample(g, [](const Point& x) { return std::polar(1.0, 8.0 * x[0]); });
  LPFilterBank bank(g);
  double expected = 8.0 * lattice_lp(bank.block(tone, 3), 3.0);
  EXPECT_NEAR(equivalent_H_norm(tone, 1.0, 3.0).value, expected, 1e-10 * expected);
  EXPECT_EQ(equivalent_H_norm(Field(g), 1.0, 3.0).value, 0.0);
}

TEST(Norms, HomogeneityTriangleMonotonicity) {
  auto g = make_grid(1, 64, 4.0);
  for (unsigned seed = 0; seed < 10; ++seed) {
    Field u = random_smooth(g, seed, 20);
    Field v = random_smooth(g, seed + 50, 20);
    for (double p : {2.0, 4.0}) {
      for (auto norm : {sobolev_norm, besov_norm, equivalent_H_norm}) {
        double nu = norm(u, 0.7, p).value;
        EXPECT_NEAR(norm(cplx(-2.5) * u, 0.7, p).value, 2.5 * nu, 1e-10 * nu);
        EXPECT_LE(norm(u + v, 0.7, p).value, nu + norm(v, 0.7, p).value + 1e-10 * nu);
      }
      EXPECT_LE(sobolev_norm(u, 0.5, p).value, sobolev_norm(u, 1.5, p).value * (1.0 + 1e-10));
    }
  }
}

TEST(MixedJump, SeparableAnnulus) {
  auto g = make_grid(1, 32, 3.0);
  Field u = random_smooth(g, 4);
  double alpha = 1.2, a = 0.5, b = 2.0;
  for (double r : {2.0, 4.0}) {
    WeightedSlice slice;
    for (const auto& node : levy_rule(alpha, 1, a, b)) {
      slice.components.push_back(u);
      slice.weights.push_back(node.weight / levy_normalization(alpha, 1));
    }
    double inner = std::pow(2.0 * (std::pow(a, -alpha) - std::pow(b, -alpha)) / alpha, 1.0 / r);
    double expected = inner * lattice_lp(u, 4.0);
    EXPECT_NEAR(mixed_jump_norm(slice, NormFamily::Hbar, 0.0, 4.0, r).value, expected, 1e-9 * expected);
  }
  EXPECT_EQ(mixed_jump_norm(WeightedSlice{{Field(g)}, {1.0}}, NormFamily::Bbar, 1.0, 2.0, 2.0).value, 0.0);
}

TEST(MixedJump, BruteForceAtREqualsP) {
  auto g = make_grid(1, 32, 3.0);
  WeightedSlice slice;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(0.1, 1.0);
  for (int i = 0; i < 7; ++i) {
    slice.components.push_back(random_smooth(g, 30 + i));
    slice.weights.push_back(U(rng));
  }
  double p = 3.0, sum = 0.0;
  for (std::size_t i = 0; i < slice.components.size(); ++i)
    sum += slice.weights[i] * std::pow(lattice_lp(slice.components[i], p), p);
  double expected = std::pow(sum, 1.0 / p);
  EXPECT_NEAR(mixed_jump_norm(slice, NormFamily::Hbar, 0.0, p, p).value, expected, 1e-9 * expected);
  slice.weights.pop_back();
  EXPECT_THROW(mixed_jump_norm(slice, NormFamily::Hbar, 0.0, p, p), ShapeError);
}

TEST(Spacetime, ConstantAndSingleSlice) {
  auto g = make_grid(1, 32, 2.0);
  Field u = random_smooth(g, 5);
  NormSpec spec{NormFamily::H, 0.5, 3.0, 0.0, NormDomain::spacetime, false};
  double slice = sobolev_norm(u, 0.5, 3.0).value;
  EXPECT_NEAR(spacetime_norm(constant_series(u, 64, 2.0), spec).value, slice * std::pow(2.0, 1.0 / 3.0), 1e-10 * slice);
  FieldSeries single = constant_series(Field(g), 10, 1.0);
  single.slices[4] = u;
  EXPECT_NEAR(spacetime_norm(single, spec).value, slice * std::pow(0.1, 1.0 / 3.0), 1e-10 * slice);
  EXPECT_THROW(spacetime_norm(FieldSeries{g, {}, {}}, spec), ShapeError);
}

TEST(Spacetime, MonteCarloDeterministicInput) {
  NormSpec spec{NormFamily::H, 0.0, 2.0, 0.0, NormDomain::spacetime, true};
  std::vector<double> powers(100, 9.0);
  auto v = monte_carlo_norm(powers, spec);
  EXPECT_DOUBLE_EQ(v.value, 3.0);
  ASSERT_TRUE(v.mc_stderr.has_value());
  EXPECT_EQ(*v.mc_stderr, 0.0);
}

TEST(Mollify, ConstantsAndContraction) {
  auto g = make_grid(2, 32, 4.0);
  Field c = Field::sample(g, [](const Point&) { return 1.7; });
  EXPECT_LT(max_abs_difference(mollify(c, 0.3), c), 1e-12);
  Field u = random_smooth(g, 6, 12);
  for (double eps : {0.05, 0.2, 0.6})
    EXPECT_LE(sobolev_norm(mollify(u, eps), 1.0, 3.0).value, sobolev_norm(u, 1.0, 3.0).value * (1.0 + 1e-8));
  EXPECT_THROW(mollify(u, 0.0), ConfigError);
}

TEST(Mollify, BumpTransformHasUnitMass) {
  EXPECT_NEAR(bump_transform(0.0, 1), 1.0, 1e-12);
  EXPECT_NEAR(bump_transform(0.0, 2), 1.0, 1e-12);
  // Direct cosine transform of the normalized 1-d bump at xi = 3.
  double mass = 0.0, value = 0.0;
  int n = 20000;
  for (int k = 1; k < n; ++k) {
    double x = -1.0 + 2.0 * k / n;
    double z = std::exp(-1.0 / (1.0 - x * x));
    mass += z;
    value += z * std::cos(3.0 * x);
  }
  EXPECT_NEAR(bump_transform(3.0, 1), value / mass, 1e-9);
}

TEST(Mollify, EpsHalvingConverges) {
  auto g = make_grid(1, 128, 8.0);
  Field u = random_smooth(g, 7, 10);
  double previous = 1e300, last = 0.0;
  for (double eps = 0.4; eps > 1e-3; eps *= 0.5) {
    last = sobolev_norm(mollify(u, eps) - u, 1.0, 2.0).value;
    EXPECT_LE(last, previous * 1.05);
    previous = last;
  }
  EXPECT_LT(last, 1e-3);
}

TEST(Mollify, CommutesWithBlocks) {
  auto g = make_grid(2, 32, 4.0);
  Field u = random_smooth(g, 8, 14);
  LPFilterBank bank(g);
  for (int j = 0; j <= bank.max_level(); ++j)
    EXPECT_LT(max_abs_difference(bank.block(mollify(u, 0.3), j), mollify(bank.block(u, j), 0.3)), 1e-12);
}

TEST(Steklov, ConstantInTimeAndEarlyWindow) {
  auto g = make_grid(1, 32, 3.0);
  Field u = random_smooth(g, 9);
  auto smoothed = steklov_smooth(constant_series(u, 100, 1.0), 8);
  Field smooth = mollify(u, 1.0 / 8);
  for (std::size_t k = 1; k < smoothed.slices.size(); ++k) {
    // Before t = 1/n the window [0, t] is shorter than 1/n.
    double scale = std::min(1.0, 8.0 * smoothed.times[k]);
    EXPECT_LT(max_abs_difference(smoothed.slices[k], cplx(scale) * smooth), 1e-12) << "t=" << smoothed.times[k];
  }

  // g(t) = t u with n = 4 at t = 0.2: n int_0^t s ds = 0.08.
  FieldSeries ramp{g, {}, {}};
  for (int k = 0; k <= 100; ++k) {
    double t = k / 100.0;
    ramp.times.push_back(t);
    ramp.slices.push_back(cplx(t) * u);
  }
  auto avg = steklov_smooth(ramp, 4);
  EXPECT_LT(max_abs_difference(avg.slices[20], cplx(0.08) * mollify(u, 0.25)), 1e-12);
  EXPECT_THROW(steklov_smooth(constant_series(u, 4, 1.0), 8), ConfigError);
}

TEST(Steklov, NDoublingConverges) {
  auto g = make_grid(1, 64, 4.0);
  Field u = random_smooth(g, 11, 8);
  FieldSeries series{g, {}, {}};
  for (int k = 0; k <= 1024; ++k) {
    double t = k / 1024.0;
    series.times.push_back(t);
    series.slices.push_back(cplx(std::sin(3.0 * t)) * u);
  }
  NormSpec spec{NormFamily::H, 0.5, 2.0, 0.0, NormDomain::spacetime, false};
  double previous = 1e300, last = 0.0;
  for (int n = 2; n <= 256; n *= 2) {
    auto smoothed = steklov_smooth(series, n);
    FieldSeries diff = series;
    for (std::size_t k = 0; k < diff.slices.size(); ++k) diff.slices[k] -= smoothed.slices[k];
    last = spacetime_norm(diff, spec).value;
    EXPECT_LE(last, previous * 1.05) << "n=" << n;
    previous = last;
  }
  EXPECT_LT(last, 1e-2 * spacetime_norm(series, spec).value);
}

TEST(Csv, HeaderAndRow) {
  EXPECT_EQ(csv_header(), "family,beta,p,r,domain,value,stderr,seed-range");
  NormValue v{NormSpec{NormFamily::Bbar, 1.5, 4.0, 2.0, NormDomain::spacetime, true}, 0.25, 0.01};
  std::string row = csv_row(v, "1-100");
  EXPECT_EQ(row.substr(0, 5), "Bbar,");
  EXPECT_NE(row.find("spacetime"), std::string::npos);
  EXPECT_NE(row.find("1-100"), std::string::npos);
}
