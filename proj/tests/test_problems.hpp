#pragma once

#include <cstddef>

#include "evoptim/batch.hpp"
#include "evoptim/params.hpp"
#include "evoptim/problem.hpp"
#include "evoptim/rng.hpp"

namespace evoptim::testing {

/// Convex test objective f(w) = 0.5 * sum((w - c)^2); ignores batches.
class QuadraticProblem {
 public:
  explicit QuadraticProblem(ParamVector center) : center_(std::move(center)) {}

  std::size_t param_count() const { return center_.size(); }

  ParamVector initial_params(RngStream& rng) const {
    ParamVector w(center_.size());
    for (auto& x : w) x = rng.normal();
    return w;
  }

  Batch sample_train_batch(std::size_t, RngStream&) const { return Batch{}; }
  Batch sample_validation_batch(std::size_t, RngStream&) const { return Batch{}; }

  double mean_loss(const ParamVector& w, const Batch&) const { return value(w); }

  double loss_and_grad(const ParamVector& w, const Batch&, ParamVector& grad) const {
    grad.resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) grad[i] = w[i] - center_[i];
    return value(w);
  }

  double fitness_sum(const ParamVector& w, const Batch&) const { return value(w); }

 private:
  double value(const ParamVector& w) const {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double d = w[i] - center_[i];
      s += 0.5 * d * d;
    }
    return s;
  }

  ParamVector center_;
};

static_assert(OptimizableProblem<QuadraticProblem>);

}  // namespace evoptim::testing
