#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "spide/errors.hpp"
#include "spide/noise.hpp"

using namespace spide;

namespace {

StableIntensity unit_intensity(double alpha, int dim) {
  return StableIntensity{alpha, dim, [](double, const Point&) { return 1.0; }, 1.0};
}

struct Moments {
  double mean = 0.0;
  double var = 0.0;
  double stderr_mean() const { return std::sqrt(var / count); }
  double count = 0.0;
};

Moments moments(const std::vector<double>& xs) {
  Moments m;
  m.count = static_cast<double>(xs.size());
  m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / m.count;
  for (double x : xs) m.var += (x - m.mean) * (x - m.mean);
  m.var /= m.count - 1.0;
  return m;
}

}  // namespace

TEST(CounterRng, StreamsAreIndependentOfEachOther) {
  CounterRng a(7, 0, stream_tag::stable), b(7, 0, stream_tag::stable), c(7, 0, stream_tag::marks), d(7, 1, 1);
  for (int i = 0; i < 100; ++i) {
    auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
    EXPECT_NE(x, d.next_u64());
  }
  CounterRng u(1, 2, 3);
  for (int i = 0; i < 10000; ++i) {
    double v = u.uniform();
    ASSERT_GT(v, 0.0);
    ASSERT_LT(v, 1.0);
  }
}

TEST(StableJumps, TailMassAndCount) {
  EXPECT_DOUBLE_EQ(stable_tail_mass(1.0, 1, 0.5), 4.0);
  auto in = unit_intensity(1.0, 1);
  std::vector<double> counts;
  for (std::uint64_t p = 0; p < 10000; ++p)
    counts.push_back(static_cast<double>(sample_stable_jumps(in, 0.5, 1.0, 42, p).size()));
  auto m = moments(counts);
  EXPECT_NEAR(m.mean, 4.0, 3.0 * m.stderr_mean());
}

TEST(StableJumps, EventsAreSortedAndOutsideCutoff) {
  auto in = unit_intensity(1.5, 2);
  auto events = sample_stable_jumps(in, 0.1, 2.0, 5, 3);
  ASSERT_FALSE(events.empty());
  for (std::size_t i = 0; i < events.size(); ++i) {
    EXPECT_GT(std::hypot(events[i].y[0], events[i].y[1]), 0.1);
    EXPECT_LE(events[i].time, 2.0);
    if (i > 0) EXPECT_LT(events[i - 1].time, events[i].time);
  }
}

TEST(StableJumps, DeterministicAndEmptyForZeroDensity) {
  auto in = unit_intensity(0.8, 1);
  auto a = sample_stable_jumps(in, 0.05, 1.0, 99, 4);
  auto b = sample_stable_jumps(in, 0.05, 1.0, 99, 4);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].time, b[i].time);
    EXPECT_EQ(a[i].y, b[i].y);
  }
  StableIntensity zero{0.8, 1, [](double, const Point&) { return 0.0; }, 1.0};
  EXPECT_TRUE(sample_stable_jumps(zero, 0.05, 1.0, 99, 4).empty());
}

TEST(StableJumps, DensityAboveBoundIsContractError) {
  StableIntensity bad{1.2, 1, [](double, const Point&) { return 2.0; }, 1.0};
  EXPECT_THROW(sample_stable_jumps(bad, 0.1, 1.0, 1), ContractError);
  EXPECT_THROW(sample_stable_jumps(unit_intensity(1.2, 1), 0.0, 1.0, 1), ConfigError);
}

TEST(StableJumps, ThinningMatchesTargetDistribution) {
  // Accept only y > 0 with probability (1 + sin y)/2 on [0.2, 2] relative to
  // the proposal; compare the empirical CDF of |y| on (0.2, 2] with the target.
  double alpha = 1.3, eps = 0.2;
  auto shape = [](double r) { return r <= 2.0 ? 0.5 * (1.0 + std::sin(3.0 * r)) : 0.0; };
  StableIntensity in{alpha, 1, [&](double, const Point& y) { return y[0] > 0.0 ? shape(y[0]) : 0.0; }, 1.0};
  std::vector<double> radii;
  for (std::uint64_t p = 0; radii.size() < 100000; ++p)
    for (const auto& e : sample_stable_jumps(in, eps, 10.0, 8, p)) radii.push_back(e.y[0]);
  std::sort(radii.begin(), radii.end());
  // Target CDF by fine trapezoid.
  int n = 20000;
  std::vector<double> grid(n + 1), cdf(n + 1, 0.0);
  for (int k = 0; k <= n; ++k) grid[k] = eps + (2.0 - eps) * k / n;
  auto dens = [&](double r) { return shape(r) * std::pow(r, -1.0 - alpha); };
  for (int k = 1; k <= n; ++k) cdf[k] = cdf[k - 1] + 0.5 * (grid[k] - grid[k - 1]) * (dens(grid[k]) + dens(grid[k - 1]));
  for (auto& c : cdf) c /= cdf.back();
  double ks = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    auto it = std::lower_bound(grid.begin(), grid.end(), radii[i]);
    std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(it - grid.begin()), n);
    double target = cdf[k];
    double emp = static_cast<double>(i + 1) / radii.size();
    ks = std::max(ks, std::abs(emp - target));
  }
  // 1% critical value of the one-sample Kolmogorov-Smirnov statistic.
  EXPECT_LT(ks, 1.63 / std::sqrt(static_cast<double>(radii.size())));
}

TEST(Marks, MeanCountAndConfigErrors) {
  MarkMeasure measure{{{0, -1.0, 0.5}, {1, 2.0, 1.5}}};
  EXPECT_DOUBLE_EQ(measure.total_mass(), 2.0);
  std::vector<double> counts;
  int second = 0, total = 0;
  for (std::uint64_t p = 0; p < 10000; ++p) {
    auto ev = sample_poisson_marks(measure, 3.0, 11, p);
    counts.push_back(static_cast<double>(ev.size()));
    for (const auto& e : ev) {
      ++total;
      if (e.mark.index == 1) ++second;
    }
  }
  auto m = moments(counts);
  EXPECT_NEAR(m.mean, 6.0, 3.0 * m.stderr_mean());
  double frac = static_cast<double>(second) / total;
  EXPECT_NEAR(frac, 0.75, 3.0 * std::sqrt(0.75 * 0.25 / total));
  EXPECT_THROW(sample_poisson_marks(MarkMeasure{{{0, 0.0, 0.0}}}, 1.0, 1), ConfigError);
  EXPECT_THROW(sample_poisson_marks(MarkMeasure{}, 1.0, 1), ConfigError);
}

TEST(Marks, NoSharedTimesWithStableEvents) {
  NoiseConfig config;
  config.stable = unit_intensity(1.0, 1);
  config.eps_cut = 0.5;
  config.marks = MarkMeasure{{{0, 1.0, 3.0}}};
  auto mesh = uniform_mesh(1.0, 8);
  for (std::uint64_t p = 0; p < 20000; ++p) {
    auto path = sample_path(config, mesh, 3, p);
    std::vector<double> stable;
    for (const auto& e : path.stable_events) stable.push_back(e.time);
    for (const auto& e : path.mark_events) ASSERT_FALSE(std::binary_search(stable.begin(), stable.end(), e.time));
  }
}

TEST(Wiener, VarianceAndIndependence) {
  auto mesh = uniform_mesh(1.0, 10000);
  double dt = 1e-4;
  auto table = sample_wiener(2, mesh, 17);
  std::vector<double> a, b, ab;
  for (const auto& row : table.increments) {
    a.push_back(row[0] * row[0]);
    b.push_back(row[1] * row[1]);
    ab.push_back(row[0] * row[1]);
  }
  auto ma = moments(a), mb = moments(b), mab = moments(ab);
  EXPECT_NEAR(ma.mean, dt, 3.0 * ma.stderr_mean());
  EXPECT_NEAR(mb.mean, dt, 3.0 * mb.stderr_mean());
  EXPECT_NEAR(mab.mean, 0.0, 3.0 * mab.stderr_mean());
}

TEST(Wiener, QuadraticVariation) {
  // One path has relative stderr sqrt(2 / 10^4) per mode; the 2% band is
  // applied to the mode average, each mode to 3 stderr.
  auto mesh = uniform_mesh(1.0, 10000);
  const int modes = 8;
  auto table = sample_wiener(modes, mesh, 23);
  double average = 0.0;
  for (int m = 0; m < modes; ++m) {
    double qv = 0.0;
    for (const auto& row : table.increments) qv += row[static_cast<std::size_t>(m)] * row[static_cast<std::size_t>(m)];
    EXPECT_NEAR(qv, 1.0, 3.0 * std::sqrt(2.0 / 10000.0)) << "mode " << m;
    average += qv / modes;
  }
  EXPECT_NEAR(average, 1.0, 0.02);
}

TEST(Path, MeshContainsEventsAndIsDeterministic) {
  NoiseConfig config;
  config.stable = unit_intensity(1.5, 1);
  config.eps_cut = 0.1;
  config.marks = MarkMeasure{{{0, 0.5, 2.0}}};
  config.wiener_modes = 3;
  auto mesh = uniform_mesh(1.0, 16);
  auto a = sample_path(config, mesh, 21, 5);
  auto b = sample_path(config, mesh, 21, 5);
  EXPECT_EQ(a.mesh, b.mesh);
  EXPECT_EQ(a.wiener.increments, b.wiener.increments);
  EXPECT_EQ(a.mesh.size(), 17 + a.stable_events.size() + a.mark_events.size());
  EXPECT_EQ(a.wiener.increments.size(), a.mesh.size() - 1);
  for (const auto* list : {&a.stable_events, &a.mark_events})
    for (const auto& e : *list) EXPECT_TRUE(std::binary_search(a.mesh.begin(), a.mesh.end(), e.time));
  std::ostringstream x, y;
  write_events_csv(x, a);
  write_events_csv(y, b);
  EXPECT_EQ(x.str(), y.str());
  EXPECT_EQ(x.str().substr(0, 24), "time,source,mark1,mark2\n");
}

TEST(Compensated, StableMeanZeroAndIsometry) {
  auto in = unit_intensity(1.0, 1);
  NoiseConfig config;
  config.stable = in;
  config.eps_cut = 0.5;
  auto mesh = uniform_mesh(1.0, 4);
  StableIntegrand indicator = [](double, const Point& y) { return std::abs(y[0]) > 0.5 ? 1.0 : 0.0; };
  EXPECT_NEAR(stable_compensator(indicator, in, 0.5, 1.0), 4.0, 1e-10);
  auto first = sample_path(config, mesh, 2, 0);
  EXPECT_NEAR(compensated_integral(indicator, first, in, 1.0), event_sum(indicator, first, 1.0) - 4.0, 1e-10);
  std::vector<double> values, squares;
  for (std::uint64_t p = 0; p < 10000; ++p) {
    auto path = sample_path(config, mesh, 2, p);
    double v = event_sum(indicator, path, 1.0) - 4.0;
    values.push_back(v);
    squares.push_back(v * v);
  }
  auto m = moments(values);
  EXPECT_NEAR(m.mean, 0.0, 3.0 * m.stderr_mean());
  EXPECT_NEAR(moments(squares).mean, 4.0, 0.2);
  auto path = sample_path(config, mesh, 2, 0);
  EXPECT_EQ(compensated_integral([](double, const Point&) { return 0.0; }, path, in, 1.0), 0.0);
}

TEST(Compensated, IsometryForRandomBoundedIntegrands) {
  auto in = unit_intensity(1.4, 1);
  NoiseConfig config;
  config.stable = in;
  config.eps_cut = 0.3;
  config.marks = MarkMeasure{{{0, -1.0, 0.7}, {1, 1.0, 1.3}}};
  auto mesh = uniform_mesh(1.0, 4);
  std::vector<NoisePath> paths;
  for (std::uint64_t p = 0; p < 4000; ++p) paths.push_back(sample_path(config, mesh, 13, p));
  for (int trial = 0; trial < 10; ++trial) {
    double a = 0.3 + 0.2 * trial, b = 0.5 * trial;
    StableIntegrand f = [=](double t, const Point& y) { return std::cos(a * y[0] + b) * (1.0 + t); };
    MarkIntegrand phi = [=](double t, const MarkAtom& m) { return std::sin(a * m.value + b + t); };
    double oracle_f = stable_compensator([&](double t, const Point& y) { return f(t, y) * f(t, y); }, in, 0.3, 1.0);
    double oracle_phi =
        mark_compensator([&](double t, const MarkAtom& m) { return phi(t, m) * phi(t, m); }, config.marks, 1.0);
    double comp_f = stable_compensator(f, in, 0.3, 1.0);
    double comp_phi = mark_compensator(phi, config.marks, 1.0);
    std::vector<double> sf, sphi;
    for (const auto& path : paths) {
      double v = event_sum(f, path, 1.0) - comp_f;
      double w = event_sum(phi, path, 1.0) - comp_phi;
      sf.push_back(v * v);
      sphi.push_back(w * w);
    }
    auto mf = moments(sf), mphi = moments(sphi);
    EXPECT_NEAR(mf.mean, oracle_f, 3.5 * mf.stderr_mean()) << "trial " << trial;
    EXPECT_NEAR(mphi.mean, oracle_phi, 3.5 * mphi.stderr_mean()) << "trial " << trial;
  }
}
