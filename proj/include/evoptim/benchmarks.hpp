#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "evoptim/error.hpp"
#include "evoptim/params.hpp"

namespace evoptim {

/// Two-variable multimodal test function with a known global minimum and an
/// analytic gradient. The domain box applies per coordinate.
struct BenchmarkFn {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
  std::array<double, 2> global_min_point{0.0, 0.0};
  double global_min_value = 0.0;
  double (*value)(double x, double y) = nullptr;
  std::array<double, 2> (*gradient)(double x, double y) = nullptr;
};

namespace detail {

inline double rastrigin_value(double x, double y) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  return 20.0 + x * x - 10.0 * std::cos(two_pi * x) + y * y -
         10.0 * std::cos(two_pi * y);
}

inline std::array<double, 2> rastrigin_gradient(double x, double y) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  return {2.0 * x + 10.0 * two_pi * std::sin(two_pi * x),
          2.0 * y + 10.0 * two_pi * std::sin(two_pi * y)};
}

// Separable two-basin quartic: f(x,y) = g(x) + g(y) with
// g(t) = (t^2-1)^2 + 0.3t. g has minima near t = -1.036 (lower) and
// t = +0.960 (higher), so f has one global minimum and three local ones.
inline double well(double t) {
  const double q = t * t - 1.0;
  return q * q + 0.3 * t;
}

inline double well_deriv(double t) { return 4.0 * t * (t * t - 1.0) + 0.3; }

inline double double_well_value(double x, double y) { return well(x) + well(y); }

inline std::array<double, 2> double_well_gradient(double x, double y) {
  return {well_deriv(x), well_deriv(y)};
}

}  // namespace detail

/// Rastrigin in two variables: f(x,y) = 20 + x^2 - 10cos(2 pi x) + y^2 -
/// 10cos(2 pi y). Local minima near every integer lattice point, one global
/// minimum f = 0 at the origin.
inline BenchmarkFn rastrigin2d() {
  BenchmarkFn fn;
  fn.name = "rastrigin2d";
  fn.lo = -5.12;
  fn.hi = 5.12;
  fn.global_min_point = {0.0, 0.0};
  fn.global_min_value = 0.0;
  fn.value = &detail::rastrigin_value;
  fn.gradient = &detail::rastrigin_gradient;
  return fn;
}

/// Tilted double well in each coordinate. Four basins; the global minimum is
/// the (t*, t*) corner with t* the lower root of 4t^3 - 4t + 0.3 = 0.
inline BenchmarkFn double_well2d() {
  BenchmarkFn fn;
  fn.name = "double_well2d";
  fn.lo = -2.0;
  fn.hi = 2.0;
  // Root and value computed at 40-digit precision, rounded to doubles.
  fn.global_min_point = {-1.0355787140888537, -1.0355787140888537};
  fn.global_min_value = -0.6108569674878319;
  fn.value = &detail::double_well_value;
  fn.gradient = &detail::double_well_gradient;
  return fn;
}

inline BenchmarkFn benchmark_by_name(const std::string& name) {
  if (name == "rastrigin2d") return rastrigin2d();
  if (name == "double_well2d") return double_well2d();
  throw ConfigError("unknown benchmark function: " + name);
}

/// Value and analytic gradient at a point inside the domain box.
inline std::pair<double, ParamVector> benchmark_eval(const BenchmarkFn& fn,
                                                     const ParamVector& w) {
  if (w.size() != 2) {
    throw ShapeError("benchmark_eval: expected 2 variables, got " +
                     std::to_string(w.size()));
  }
  for (int i = 0; i < 2; ++i) {
    if (!(w[i] >= fn.lo && w[i] <= fn.hi)) {
      throw DomainError("benchmark_eval: coordinate " + std::to_string(i) +
                        " = " + std::to_string(w[i]) + " outside [" +
                        std::to_string(fn.lo) + ", " + std::to_string(fn.hi) + "]");
    }
  }
  const auto g = fn.gradient(w[0], w[1]);
  return {fn.value(w[0], w[1]), ParamVector{g[0], g[1]}};
}

}  // namespace evoptim
