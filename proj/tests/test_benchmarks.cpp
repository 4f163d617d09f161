#include <gtest/gtest.h>

#include <cmath>

#include "evoptim/benchmarks.hpp"
#include "evoptim/rng.hpp"

using namespace evoptim;

namespace {

double grad_norm(const ParamVector& g) { return std::sqrt(g[0] * g[0] + g[1] * g[1]); }

void check_gradient_against_central_differences(const BenchmarkFn& fn) {
  RngStream rng(17);
  const double h = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    const double x = rng.uniform(fn.lo + h, fn.hi - h);
    const double y = rng.uniform(fn.lo + h, fn.hi - h);
    const auto analytic = fn.gradient(x, y);
    const double fd_x = (fn.value(x + h, y) - fn.value(x - h, y)) / (2 * h);
    const double fd_y = (fn.value(x, y + h) - fn.value(x, y - h)) / (2 * h);
    const double err = std::hypot(analytic[0] - fd_x, analytic[1] - fd_y);
    const double denom = std::max(1.0, std::hypot(analytic[0], analytic[1]));
    EXPECT_LT(err / denom, 1e-6) << fn.name << " at (" << x << ", " << y << ")";
  }
}

}  // namespace

TEST(Benchmarks, RastriginGlobalMinimum) {
  const BenchmarkFn fn = rastrigin2d();
  const auto [value, grad] = benchmark_eval(fn, {0.0, 0.0});
  EXPECT_EQ(value, 0.0);
  EXPECT_LT(grad_norm(grad), 1e-8);
  EXPECT_NEAR(value, fn.global_min_value, 1e-9);
}

TEST(Benchmarks, DoubleWellGlobalMinimum) {
  const BenchmarkFn fn = double_well2d();
  const ParamVector at{fn.global_min_point[0], fn.global_min_point[1]};
  const auto [value, grad] = benchmark_eval(fn, at);
  EXPECT_NEAR(value, fn.global_min_value, 1e-9);
  EXPECT_LT(grad_norm(grad), 1e-8);
}

TEST(Benchmarks, DoubleWellHasHigherSecondaryBasin) {
  // The opposite well bottoms out strictly above the global minimum.
  const BenchmarkFn fn = double_well2d();
  const double high_basin = fn.value(0.96014955551910552, 0.96014955551910552);
  EXPECT_GT(high_basin, fn.global_min_value + 0.5);
}

TEST(Benchmarks, GradientsMatchFiniteDifferences) {
  check_gradient_against_central_differences(rastrigin2d());
  check_gradient_against_central_differences(double_well2d());
}

TEST(Benchmarks, CoordinateSymmetry) {
  RngStream rng(23);
  for (const auto& fn : {rastrigin2d(), double_well2d()}) {
    for (int trial = 0; trial < 20; ++trial) {
      const double a = rng.uniform(fn.lo, fn.hi);
      const double b = rng.uniform(fn.lo, fn.hi);
      EXPECT_DOUBLE_EQ(fn.value(a, b), fn.value(b, a)) << fn.name;
    }
  }
}

TEST(Benchmarks, DomainAndShapeErrors) {
  const BenchmarkFn fn = rastrigin2d();
  EXPECT_THROW(benchmark_eval(fn, {6.0, 0.0}), DomainError);
  EXPECT_THROW(benchmark_eval(fn, {0.0, -6.0}), DomainError);
  EXPECT_THROW(benchmark_eval(fn, {0.0}), ShapeError);
  EXPECT_NO_THROW(benchmark_eval(fn, {5.12, -5.12}));
}

TEST(Benchmarks, LookupByName) {
  EXPECT_EQ(benchmark_by_name("rastrigin2d").name, "rastrigin2d");
  EXPECT_EQ(benchmark_by_name("double_well2d").name, "double_well2d");
  EXPECT_THROW(benchmark_by_name("nope"), ConfigError);
}
