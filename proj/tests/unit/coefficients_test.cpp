#include <gtest/gtest.h>

#include <cmath>

#include "spide/coefficients.hpp"
#include "spide/errors.hpp"

using namespace spide;

namespace {

bool has_clause(const ValidationReport& r, const std::string& prefix) {
  for (const auto& v : r.violations)
    if (v.clause.rfind(prefix, 0) == 0) return true;
  return false;
}

}  // namespace

TEST(ValidateA0, ConstantProfilePasses) {
  auto r = validate_A0([](double, const Point&) { return 1.0; }, 0.5, 1, 1.0, 1.0);
  EXPECT_TRUE(r.passed);
}

TEST(ValidateA0, OddMomentAtOrderOne) {
  auto r = validate_A0([](double, const Point& y) { return 1.0 + (y[0] > 0 ? 1.0 : -1.0); }, 1.0, 1, 0.1, 2.0);
  EXPECT_FALSE(r.passed);
  EXPECT_TRUE(has_clause(r, "A0(ii)"));
  for (const auto& v : r.violations)
    if (v.clause.rfind("A0(ii)", 0) == 0) EXPECT_NEAR(v.observed, 2.0, 1e-12);
}

TEST(ValidateA0, ZeroProfileIsDegenerate) {
  auto r = validate_A0([](double, const Point&) { return 0.0; }, 1.5, 2, 0.1, 1.0);
  EXPECT_TRUE(has_clause(r, "A0(iii)"));
}

TEST(ValidateA0, HalfSphereProfileIsAdmissible) {
  auto half = [](double, const Point& y) { return y[0] > 0.0 ? 1.0 : 0.0; };
  EXPECT_TRUE(validate_A0(half, 1.5, 2, 0.5, 1.0).passed);
  EXPECT_TRUE(validate_A0(half, 0.5, 1, 1.0, 1.0).passed);
}

TEST(ValidateA0, NonHomogeneousProfileFails) {
  auto r = validate_A0([](double, const Point& y) { return 1.0 / (1.0 + std::hypot(y[0], y[1])); }, 1.5, 1, 0.01, 1.0);
  EXPECT_TRUE(has_clause(r, "A0(i) homogeneity"));
}

TEST(ValidateA0, EvaluatorFailureCarriesSamplePoint) {
  auto bad = [](double, const Point&) -> double { throw std::runtime_error("boom"); };
  EXPECT_THROW(validate_A0(bad, 1.5, 1, 1.0, 1.0), EvaluationError);
}

TEST(ValidateA, SuperparabolicMargin) {
  CoefficientSet c;
  c.alpha = 1.5;
  c.m = [](double, const Point&) { return 1.0; };
  c.l = [](double, const Point&) { return 0.5; };
  c.m0 = [](double, const Point&) { return 0.4; };
  c.delta = 0.4;
  c.K = 2.0;
  EXPECT_TRUE(validate_A(c).passed);
  c.m0 = [](double, const Point&) { return 0.6; };
  c.delta = 0.6;
  EXPECT_TRUE(has_clause(validate_A(c), "A(iii)"));
}

TEST(ValidateA, DiffusionEigenvalue) {
  CoefficientSet c;
  c.alpha = 2.0;
  c.dim = 2;
  c.delta = 0.7;
  c.K = 2.0;
  c.B = [](double) { return SymMatrix{0.7, 0.0, 0.7}; };
  EXPECT_TRUE(validate_A(c).passed);
  c.sigma = [](double) { return SigmaRows{{0.5, 0.0}, {0.0, 0.0}}; };
  EXPECT_TRUE(has_clause(validate_A(c), "A(iii)"));
}

TEST(ValidateA, DriftBoundReportsTime) {
  CoefficientSet c;
  c.alpha = 1.0;
  c.K = 2.0;
  c.b = [](double t) { return Point{t > 0.6 ? 3.0 : 0.0, 0.0}; };
  auto r = validate_A(c);
  ASSERT_FALSE(r.passed);
  EXPECT_EQ(r.violations.front().clause, "A(ii) bound");
  EXPECT_GT(r.violations.front().t, 0.6);
}

TEST(ValidateA, OrderOneDriftCancellation) {
  CoefficientSet c;
  c.alpha = 1.0;
  c.K = 2.0;
  c.delta = 0.5;
  c.m0 = [](double, const Point&) { return 0.5; };
  c.m = [](double, const Point& y) { return y[0] > 0 ? 1.5 : 0.5; };
  EXPECT_TRUE(has_clause(validate_A(c), "A(ii) drift"));
}

TEST(Presets, AllValidate) {
  for (double alpha : {0.5, 1.0, 1.5}) {
    for (int d : {1, 2}) {
      for (const char* name : {"fractional-laplacian", "kim-form", "half-sphere-degenerate"}) {
        if (std::string(name) == "half-sphere-degenerate" && alpha == 1.0 && d == 1) continue;
        auto c = make_preset(name, alpha, d);
        auto r = validate_A(c);
        EXPECT_TRUE(r.passed) << name << " alpha=" << alpha << " d=" << d << " "
                              << (r.passed ? "" : r.violations.front().clause);
      }
    }
  }
  EXPECT_TRUE(validate_A(make_preset("heat", 2.0, 2)).passed);
  EXPECT_TRUE(validate_A(make_preset("fractional-laplacian", 2.0, 1)).passed);
}

TEST(Presets, UnknownNameNamesField) {
  try {
    make_preset("nope", 1.0);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "preset");
  }
  EXPECT_THROW(make_preset("half-sphere-degenerate", 1.0, 1), ConfigError);
}
