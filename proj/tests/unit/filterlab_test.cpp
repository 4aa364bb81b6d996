#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "filterlab/config.hpp"
#include "filterlab/experiments.hpp"
#include "filterlab/report.hpp"
#include "filterlab/suite.hpp"
#include "spide/errors.hpp"
#include "spide/propagator.hpp"

namespace {

using namespace filterlab;
using nlohmann::json;

std::string field_of(const json& doc) {
  try {
    parse_config(doc);
  } catch (const spide::ConfigError& e) {
    return e.field();
  }
  return "";
}

double mass(const spide::Field& u) {
  double s = 0.0;
  for (const auto& v : u.values()) s += v.real();
  return s * u.grid().cell_volume();
}

spide::Field gaussian_density(const spide::SpectralGrid& grid, double w) {
  return spide::Field::sample(grid, [w](const spide::Point& x) {
    return std::exp(-0.5 * x[0] * x[0] / (w * w)) / (std::sqrt(2.0 * spide::kPi) * w);
  });
}

TEST(Config, DefaultsParseAndRoundTrip) {
  auto c = parse_config(json::object());
  EXPECT_EQ(c.preset, "fractional-laplacian");
  EXPECT_EQ(c.paths, 10000);
  auto again = parse_config(to_json(c));
  EXPECT_EQ(to_json(again), to_json(c));
}

TEST(Config, ErrorsNameTheField) {
  EXPECT_EQ(field_of({{"preset", "no-such-preset"}}), "preset");
  EXPECT_EQ(field_of({{"paths", 0}}), "paths");
  EXPECT_EQ(field_of({{"grid", {{"N", 64}, {"bogus", 1}}}}), "grid.bogus");
  EXPECT_EQ(field_of({{"inputs", {{"u0", {{"shape", "triangle"}}}}}}), "inputs.u0.shape");
  EXPECT_EQ(field_of({{"criteria", {"C13"}}}), "criteria");
  EXPECT_EQ(field_of({{"typo_key", 1}}), "typo_key");
  EXPECT_EQ(field_of(json::array()), "config");
}

TEST(Config, UnreadableFileIsAConfigError) {
  auto path = std::filesystem::temp_directory_path() / "filterlab_bad.json";
  std::ofstream(path) << "{ not json";
  EXPECT_THROW(load_config(path), spide::ConfigError);
  std::filesystem::remove(path);
}

TEST(BandField, SameFunctionOnEveryGrid) {
  auto coarse = spide::make_grid(1, 64, 8.0);
  auto fine = spide::make_grid(1, 128, 8.0);
  auto a = band_field(coarse, 5, 8), b = band_field(fine, 5, 8);
  for (std::size_t j = 0; j < coarse.size(); ++j) EXPECT_NEAR(a[j].real(), b[2 * j].real(), 1e-12);
}

TEST(Report, ZeroToleranceFailsAndNamesTheCriterion) {
  CriterionResult r;
  r.id = "C3";
  r.name = "bounds";
  r.checks.push_back({"gap", 1e-9, 1e-6});
  EXPECT_TRUE(r.pass());
  r.scale_tolerances(0.0);
  EXPECT_FALSE(r.pass());
  SuiteReport report;
  report.criteria.push_back(r);
  auto doc = to_json(report);
  EXPECT_FALSE(doc["pass"].get<bool>());
  EXPECT_EQ(doc["criteria"][0]["name"], "C3 bounds");
  EXPECT_FALSE(doc["criteria"][0]["pass"].get<bool>());
}

TEST(Report, CriterionWithoutChecksFails) {
  CriterionResult r;
  EXPECT_FALSE(r.pass());
}

TEST(Report, EmptyReportHasEmptyCriteriaArray) {
  auto files = render_results(SuiteReport{});
  auto doc = json::parse(files.at("suite.json"));
  EXPECT_TRUE(doc["criteria"].is_array());
  EXPECT_TRUE(doc["criteria"].empty());
  EXPECT_TRUE(doc["pass"].get<bool>());
}

TEST(Report, UnwritableDirectoryRaisesIoError) {
  auto blocker = std::filesystem::temp_directory_path() / "filterlab_blocker";
  std::ofstream(blocker) << "a file, not a directory";
  EXPECT_THROW(emit_results(SuiteReport{}, blocker / "out"), spide::IoError);
  std::filesystem::remove(blocker);
}

TEST(Suite, ToleranceScaleZeroFailsSelectedCriterion) {
  auto c2 = parse_config({{"criteria", {"C9"}}, {"tolerance_scale", {{"C9", 0.0}}}});
  auto r2 = run_suite(c2);
  EXPECT_FALSE(r2.pass());
  EXPECT_EQ(r2.criteria[0].id, "C9");
}

TEST(Suite, RenderIsDeterministic) {
  auto c = parse_config({{"criteria", {"C1", "C9"}}, {"determinism_rerun", false}});
  EXPECT_EQ(render_results(run_suite(c)), render_results(run_suite(c)));
}

TEST(Suite, DeterminismCriterionPasses) {
  auto c = parse_config({{"criteria", {"C9", "C12"}}});
  auto report = run_suite(c);
  ASSERT_EQ(report.criteria.size(), 2u);
  EXPECT_TRUE(report.criteria[1].pass());
}

TEST(Oracle, TimeZeroIsIdentity) {
  auto grid = spide::make_grid(1, 128, 8.0);
  auto u0 = gaussian_density(grid, 1.0);
  auto c = spide::make_preset("fractional-laplacian", 1.0, 1);
  EXPECT_LT(spide::max_abs_difference(conditional_oracle(u0, c, 0.0, 0.0), u0), 1e-14);
}

TEST(Oracle, NoIndependentMotionIsPureShift) {
  // Wide box so the periodic wrap of the shifted tail stays below roundoff.
  auto grid = spide::make_grid(1, 256, 16.0);
  auto u0 = gaussian_density(grid, 1.0);
  auto c = spide::make_preset("fractional-laplacian", 1.0, 1);
  c.m = [](double, const spide::Point&) { return 0.0; };
  c.m0 = c.m;
  const double shift = 0.75;
  auto expected = spide::Field::sample(grid, [&](const spide::Point& x) {
    double z = x[0] - shift;
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * spide::kPi);
  });
  EXPECT_LT(spide::max_abs_difference(conditional_oracle(u0, c, shift, 0.6), expected), 1e-12);
}

TEST(Oracle, ConservesMass) {
  auto grid = spide::make_grid(1, 256, 16.0);
  auto u0 = gaussian_density(grid, 1.0);
  auto c = spide::make_preset("fractional-laplacian", 1.5, 1);
  for (double t : {0.1, 0.5, 1.0}) EXPECT_NEAR(mass(conditional_oracle(u0, c, -0.4, t)), 1.0, 1e-8);
}

TEST(Oracle, NegativeMassIsAConfigError) {
  auto grid = spide::make_grid(1, 64, 8.0);
  auto u0 = spide::Field(grid) - gaussian_density(grid, 1.0);
  auto c = spide::make_preset("fractional-laplacian", 1.0, 1);
  try {
    conditional_oracle(u0, c, 0.0, 1.0);
    FAIL();
  } catch (const spide::ConfigError& e) {
    EXPECT_EQ(e.field(), "u0");
  }
}

TEST(Zakai, NoObservationsGivesTheUnconditionalDensity) {
  ZakaiSpec z;
  z.m2 = 0.0;
  z.grid = {1, 128, 16.0};
  z.steps = 64;
  auto out = zakai_demo(z, 3);
  EXPECT_EQ(out.observed_jumps, 0u);
  auto grid = z.grid.make();
  auto c = spide::make_preset("fractional-laplacian", z.alpha, 1);
  auto unconditional = conditional_oracle(gaussian_density(grid, z.u0_width), c, 0.0, z.T);
  EXPECT_LT(spide::max_abs_difference(out.filter, unconditional), 1e-10);
}

TEST(Zakai, DefaultDemoMatchesOracle) {
  ZakaiSpec z;
  auto out = zakai_demo(z, 11);
  EXPECT_GT(out.observed_jumps, 0u);
  EXPECT_LE(out.sup_distance, 1e-3);
  EXPECT_LE(out.worst_mass_error, 1e-6);
  EXPECT_GE(out.min_value, -1e-6);
}

TEST(Kernel, NodesResolveTheSpectrum) {
  int n = kernel_nodes(0.5, 0.1, 8.0);
  double reach = spide::kPi * (n / 2) / 8.0;
  EXPECT_LE(std::exp(-0.1 * std::pow(reach, 0.5)), 1e-15);
  EXPECT_EQ(kernel_nodes(2.0, 1.0, 8.0), 256);
}

TEST(Regularity, AllZeroInputsGiveZeroRatio) {
  EXPECT_EQ(regularity_ratio(0.0, 0.0), 0.0);
  EXPECT_EQ(regularity_ratio(2.0, 4.0), 0.5);
}

TEST(Regularity, SweepRowsAreFinite) {
  auto c = parse_config(json::object());
  auto rows = regularity_sweep(c, 2, {32, 64}, 2);
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& r : rows) {
    EXPECT_TRUE(std::isfinite(r.ratio));
    EXPECT_GE(r.ratio, 0.0);
  }
}

}  // namespace
