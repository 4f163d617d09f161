#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>

#include "evoptim/batch.hpp"
#include "evoptim/benchmarks.hpp"
#include "evoptim/dataset.hpp"
#include "evoptim/mlp.hpp"
#include "evoptim/params.hpp"
#include "evoptim/rng.hpp"

namespace evoptim {

/// What the evolution engine and the single-model trainers need from an
/// optimization problem: fresh parameters, batch sources, and differentiable
/// loss. `fitness_sum` is the per-batch TOTAL loss used for model comparison
/// (objectives that ignore data just return the objective value).
template <typename P>
concept OptimizableProblem = requires(const P& p, const ParamVector& w,
                                      ParamVector& grad, const Batch& batch,
                                      RngStream& rng, std::size_t n) {
  { p.param_count() } -> std::convertible_to<std::size_t>;
  { p.initial_params(rng) } -> std::convertible_to<ParamVector>;
  { p.sample_train_batch(n, rng) } -> std::convertible_to<Batch>;
  { p.sample_validation_batch(n, rng) } -> std::convertible_to<Batch>;
  { p.mean_loss(w, batch) } -> std::convertible_to<double>;
  { p.loss_and_grad(w, batch, grad) } -> std::convertible_to<double>;
  { p.fitness_sum(w, batch) } -> std::convertible_to<double>;
};

/// MLP trained on a dataset. Training and validation batches are both drawn
/// from the training split; the held-out test split is only used for final
/// metrics. The referenced datasets must outlive the problem and are never
/// mutated, so concurrent evaluation is safe.
class MlpProblem {
 public:
  MlpProblem(MlpShape shape, const Dataset* train, const Dataset* test,
             InitScheme init = InitScheme::FanInScaled)
      : shape_(std::move(shape)), train_(train), test_(test), init_(init) {
    shape_.validate();
  }

  const MlpShape& shape() const { return shape_; }
  const Dataset& train_data() const { return *train_; }
  const Dataset* test_data() const { return test_; }

  std::size_t param_count() const { return shape_.param_count(); }

  ParamVector initial_params(RngStream& rng) const {
    return shape_.init_params(init_, rng);
  }

  Batch sample_train_batch(std::size_t b, RngStream& rng) const {
    return sample_batch(*train_, std::min(b, train_->rows), rng);
  }

  Batch sample_validation_batch(std::size_t b, RngStream& rng) const {
    return sample_batch(*train_, std::min(b, train_->rows), rng);
  }

  double mean_loss(const ParamVector& w, const Batch& batch) const {
    return mlp_loss(shape_, w, batch);
  }

  double loss_and_grad(const ParamVector& w, const Batch& batch, ParamVector& grad) const {
    return mlp_loss_and_grad(shape_, w, batch, grad);
  }

  /// Total (summed) loss over the batch.
  double fitness_sum(const ParamVector& w, const Batch& batch) const {
    return mlp_loss(shape_, w, batch) * static_cast<double>(batch.rows);
  }

  struct TestMetrics {
    double accuracy = 0.0;
    double mean_loss = 0.0;
  };

  TestMetrics test_metrics(const ParamVector& w) const {
    Batch all = make_batch_of_all(*test_);
    return {mlp_accuracy(shape_, w, all), mlp_loss(shape_, w, all)};
  }

 private:
  static Batch make_batch_of_all(const Dataset& ds) {
    std::vector<std::size_t> idx(ds.rows);
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return make_batch(ds, idx);
  }

  MlpShape shape_;
  const Dataset* train_;
  const Dataset* test_;
  InitScheme init_;
};

/// Analytic two-variable objective. Batches are empty and ignored; the loss
/// is the function value itself. Initial points are uniform over the domain
/// box (multiple spread-out starting points are the whole point of these
/// functions); gradients are evaluated by the analytic formula everywhere,
/// including outside the box if an optimizer wanders out.
class BenchmarkProblem {
 public:
  explicit BenchmarkProblem(BenchmarkFn fn) : fn_(std::move(fn)) {}

  const BenchmarkFn& fn() const { return fn_; }

  std::size_t param_count() const { return 2; }

  ParamVector initial_params(RngStream& rng) const {
    return {rng.uniform(fn_.lo, fn_.hi), rng.uniform(fn_.lo, fn_.hi)};
  }

  Batch sample_train_batch(std::size_t, RngStream&) const { return Batch{}; }
  Batch sample_validation_batch(std::size_t, RngStream&) const { return Batch{}; }

  double mean_loss(const ParamVector& w, const Batch&) const {
    return fn_.value(w[0], w[1]);
  }

  double loss_and_grad(const ParamVector& w, const Batch&, ParamVector& grad) const {
    const auto g = fn_.gradient(w[0], w[1]);
    grad.assign({g[0], g[1]});
    return fn_.value(w[0], w[1]);
  }

  double fitness_sum(const ParamVector& w, const Batch&) const {
    return fn_.value(w[0], w[1]);
  }

 private:
  BenchmarkFn fn_;
};

static_assert(OptimizableProblem<MlpProblem>);
static_assert(OptimizableProblem<BenchmarkProblem>);

}  // namespace evoptim
