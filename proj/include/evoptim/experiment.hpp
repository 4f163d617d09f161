#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "evoptim/config.hpp"
#include "evoptim/dataset.hpp"
#include "evoptim/error.hpp"
#include "evoptim/evolution.hpp"
#include "evoptim/metrics.hpp"
#include "evoptim/problem.hpp"
#include "evoptim/thread_pool.hpp"

namespace evoptim {

// --- objective construction --------------------------------------------------

/// Owns the loaded datasets (stable addresses) and the problem built on top.
struct BuiltObjective {
  std::unique_ptr<std::pair<Dataset, Dataset>> data;  // train, test
  std::optional<MlpProblem> mlp;
  std::optional<BenchmarkProblem> benchmark;
};

namespace detail {

inline std::size_t default_hidden_width(const DataSourceConfig& d) {
  switch (d.format) {
    case DataSourceConfig::Format::MnistIdx: return 128;
    case DataSourceConfig::Format::Csv:
      if (d.schema == "adult" || d.schema == "letter") return 64;
      return 32;
    case DataSourceConfig::Format::Synthetic: return 32;
  }
  return 32;
}

inline Dataset subsample_rows(const Dataset& ds, std::size_t n, std::uint64_t seed) {
  if (n == 0 || n >= ds.rows) return ds;
  RngStream rng(derive_seed(seed, 0x5ab5aULL));
  std::vector<std::size_t> idx(ds.rows);
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  shuffle_indices(idx, rng);
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  return take_rows(ds, idx);
}

}  // namespace detail

inline BuiltObjective build_objective(const ObjectiveConfig& cfg) {
  BuiltObjective out;
  if (cfg.kind == ObjectiveConfig::Kind::Benchmark) {
    out.benchmark.emplace(benchmark_by_name(cfg.benchmark));
    return out;
  }

  const DataSourceConfig& d = cfg.data;
  Dataset train, test;
  if (d.format == DataSourceConfig::Format::MnistIdx) {
    Dataset loaded = load_mnist_idx(d.images_path, d.labels_path);
    if (!d.test_images_path.empty()) {
      train = std::move(loaded);
      test = load_mnist_idx(d.test_images_path, d.test_labels_path);
    } else {
      SplitSpec spec;
      spec.train_fraction = d.train_fraction;
      spec.seed = d.split_seed;
      std::tie(train, test) = split(loaded, spec);
    }
    train = detail::subsample_rows(train, d.subsample, d.split_seed);
  } else {
    Dataset loaded = d.format == DataSourceConfig::Format::Csv
                         ? load_csv_dataset(d.path, csv_schema_by_name(d.schema))
                         : synthetic_classification(d.synthetic_rows, d.synthetic_cols,
                                                    d.synthetic_classes, d.synthetic_seed,
                                                    d.synthetic_separation);
    SplitSpec spec;
    if (d.per_class > 0) {
      spec.kind = SplitSpec::Kind::PerClassCount;
      spec.per_class = d.per_class;
    } else {
      spec.train_fraction = d.train_fraction;
    }
    spec.seed = d.split_seed;
    std::tie(train, test) = split(loaded, spec);
    if (d.standardize) {
      const FeatureScaling scaling = fit_standardization(train);
      apply_scaling(train, scaling);
      apply_scaling(test, scaling);
    }
  }

  std::vector<std::size_t> layers = cfg.mlp_layers;
  if (layers.empty()) {
    layers = {train.cols, detail::default_hidden_width(d),
              static_cast<std::size_t>(train.class_count)};
  } else {
    if (layers.front() != train.cols) {
      throw ConfigError("mlp.layers: input width " + std::to_string(layers.front()) +
                        " does not match the data (" + std::to_string(train.cols) + ")");
    }
    if (cfg.output == OutputKind::SoftmaxCrossEntropy &&
        layers.back() != static_cast<std::size_t>(train.class_count)) {
      throw ConfigError("mlp.layers: output width " + std::to_string(layers.back()) +
                        " does not match the class count (" +
                        std::to_string(train.class_count) + ")");
    }
  }

  out.data = std::make_unique<std::pair<Dataset, Dataset>>(std::move(train), std::move(test));
  MlpShape shape(layers, cfg.activation, cfg.output);
  out.mlp.emplace(std::move(shape), &out.data->first, &out.data->second, cfg.init);
  return out;
}

// --- single-model training ---------------------------------------------------

struct SingleRunResult {
  ParamVector w;
  std::vector<std::pair<std::uint64_t, double>> train_curve;  // (step, batch loss)
  double val_loss_sum = 0.0;  // summed loss on the shared validation batch
  std::size_t val_rows = 0;
  double final_train_loss = std::numeric_limits<double>::quiet_NaN();
};

/// Trains one model with the given stepper for a fixed number of steps.
/// Stream layout mirrors the population learner: the model samples training
/// batches from stream `stream_id`, and the shared validation batch is the
/// coordinator stream's first draw.
template <OptimizableProblem P>
SingleRunResult run_single_optimizer(const P& problem, const OptimizerSpec& spec,
                                     std::size_t steps, std::size_t batch_size,
                                     std::size_t v_size, std::uint64_t master_seed,
                                     std::uint64_t stream_id = 0,
                                     std::size_t log_every = 10) {
  RngStream coord(derive_seed(master_seed, ~std::uint64_t{0}));
  const Batch val_batch = problem.sample_validation_batch(v_size, coord);

  SingleRunResult out;
  RngStream rng(derive_seed(master_seed, stream_id));
  out.w = problem.initial_params(rng);
  Optimizer opt(spec, out.w.size());
  ParamVector grad;
  for (std::size_t step = 1; step <= steps; ++step) {
    const Batch batch = problem.sample_train_batch(batch_size, rng);
    const double loss = problem.loss_and_grad(out.w, batch, grad);
    opt.step(out.w, grad);
    out.final_train_loss = loss;
    if (log_every > 0 && (step % log_every == 0 || step == steps)) {
      out.train_curve.emplace_back(step, loss);
    }
  }
  out.val_loss_sum = problem.fitness_sum(out.w, val_batch);
  out.val_rows = val_batch.rows;
  return out;
}

// --- multi-start baseline ----------------------------------------------------

struct MultiStartResult {
  std::vector<double> final_losses;  // summed loss of each run on the shared batch
  std::vector<ParamVector> finals;
  std::size_t best_index = 0;
  std::size_t val_rows = 0;
};

/// g independent Adam runs with best-of selection on one shared validation
/// batch. Initial points and batch streams are derived exactly as the
/// population learner derives them (model ids 0..g-1), so for a common
/// master seed the two searches start from identical models and the genetic
/// operators are the only difference.
template <OptimizableProblem P>
MultiStartResult multi_start_adam(const P& problem, std::size_t g, std::size_t steps,
                                  const AdamConfig& adam, std::size_t batch_size,
                                  std::size_t v_size, std::uint64_t master_seed,
                                  ThreadPool& pool) {
  RngStream coord(derive_seed(master_seed, ~std::uint64_t{0}));
  const Batch val_batch = problem.sample_validation_batch(v_size, coord);

  MultiStartResult out;
  out.val_rows = val_batch.rows;
  out.final_losses.assign(g, 0.0);
  out.finals.assign(g, {});
  pool.run_indexed(g, [&](std::size_t i) {
    RngStream rng(derive_seed(master_seed, i));
    ParamVector w = problem.initial_params(rng);
    AdamState state = AdamState::fresh(w.size(), adam);
    ParamVector grad;
    for (std::size_t step = 0; step < steps; ++step) {
      const Batch batch = problem.sample_train_batch(batch_size, rng);
      problem.loss_and_grad(w, batch, grad);
      adam_step(w, grad, state);
    }
    out.final_losses[i] = problem.fitness_sum(w, val_batch);
    out.finals[i] = std::move(w);
  });
  out.best_index = static_cast<std::size_t>(
      std::min_element(out.final_losses.begin(), out.final_losses.end()) -
      out.final_losses.begin());
  return out;
}

// --- experiment execution ----------------------------------------------------

struct SeedRunResult {
  std::uint64_t seed = 0;
  double val_loss = std::numeric_limits<double>::quiet_NaN();  // per instance
  double test_accuracy = std::numeric_limits<double>::quiet_NaN();
  double test_loss = std::numeric_limits<double>::quiet_NaN();
  ParamVector best_w;
  std::vector<GenerationRecord> generations;  // population learner only
  std::vector<MetricsRecord> metrics;
};

struct ExperimentResult {
  std::string algorithm;
  std::vector<SeedRunResult> seeds;
};

namespace detail {

inline double per_instance(double loss_sum, std::size_t rows) {
  return rows > 0 ? loss_sum / static_cast<double>(rows) : loss_sum;
}

template <OptimizableProblem P>
void attach_test_metrics(const P& problem, SeedRunResult& r) {
  if constexpr (requires(const P& p, const ParamVector& w) { p.test_metrics(w); }) {
    const auto m = problem.test_metrics(r.best_w);
    r.test_accuracy = m.accuracy;
    r.test_loss = m.mean_loss;
  }
}

template <OptimizableProblem P>
SeedRunResult execute_seed(const P& problem, const ExperimentConfig& cfg,
                           std::uint64_t seed, ThreadPool& pool) {
  SeedRunResult r;
  r.seed = seed;
  const std::string run_id = cfg.algorithm + "-s" + std::to_string(seed);
  const auto t0 = std::chrono::steady_clock::now();

  if (cfg.algorithm == "gadam") {
    EvolutionConfig ecfg = cfg.evolution;
    ecfg.master_seed = seed;
    const EvolutionResult res = run_evolution(problem, ecfg, pool);
    r.best_w = res.best.w;
    r.generations = res.history;
    for (const auto& rec : res.history) {
      MetricsRecord m;
      m.run_id = run_id;
      m.seed = seed;
      m.algorithm = cfg.algorithm;
      m.index = rec.generation;
      double train_sum = 0.0;
      for (double v : rec.final_train_losses) train_sum += v;
      m.train_loss = train_sum / static_cast<double>(rec.final_train_losses.size());
      m.val_loss = per_instance(rec.best_loss, rec.selection_rows);
      m.adoption_count = static_cast<double>(rec.children_adopted);
      m.wall_ms = rec.wall_ms;
      r.metrics.push_back(std::move(m));
    }
    r.val_loss = per_instance(res.history.back().best_loss,
                              res.history.back().selection_rows);
  } else if (cfg.algorithm == "multi-start-adam") {
    const AdamConfig adam{cfg.optimizer.eta, cfg.optimizer.beta1, cfg.optimizer.beta2,
                          cfg.optimizer.eps};
    const MultiStartResult res =
        multi_start_adam(problem, cfg.runs, cfg.train_steps, adam, cfg.batch_size,
                         cfg.validation_batch_size, seed, pool);
    r.best_w = res.finals[res.best_index];
    r.val_loss = per_instance(res.final_losses[res.best_index], res.val_rows);
    for (std::size_t i = 0; i < res.final_losses.size(); ++i) {
      MetricsRecord m;
      m.run_id = run_id;
      m.seed = seed;
      m.algorithm = cfg.algorithm;
      m.index = i + 1;
      m.val_loss = per_instance(res.final_losses[i], res.val_rows);
      r.metrics.push_back(std::move(m));
    }
  } else {
    const SingleRunResult res =
        run_single_optimizer(problem, cfg.optimizer, cfg.train_steps, cfg.batch_size,
                             cfg.validation_batch_size, seed, 0, cfg.log_every);
    r.best_w = res.w;
    r.val_loss = per_instance(res.val_loss_sum, res.val_rows);
    for (const auto& [step, loss] : res.train_curve) {
      MetricsRecord m;
      m.run_id = run_id;
      m.seed = seed;
      m.algorithm = cfg.algorithm;
      m.index = step;
      m.train_loss = loss;
      r.metrics.push_back(std::move(m));
    }
  }

  attach_test_metrics(problem, r);
  if (!r.metrics.empty()) {
    MetricsRecord& last = r.metrics.back();
    last.val_loss = r.val_loss;
    last.test_accuracy = r.test_accuracy;
    const double wall = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - t0).count();
    if (std::isnan(last.wall_ms)) last.wall_ms = wall;
  }
  return r;
}

template <OptimizableProblem P>
ExperimentResult execute_with_problem(const P& problem, const ExperimentConfig& cfg,
                                      ThreadPool& pool) {
  ExperimentResult out;
  out.algorithm = cfg.algorithm;
  for (const std::uint64_t seed : cfg.seeds) {
    out.seeds.push_back(execute_seed(problem, cfg, seed, pool));
  }
  return out;
}

}  // namespace detail

/// Runs the configured algorithm over all seeds, in memory.
inline ExperimentResult execute_experiment(const ExperimentConfig& cfg, ThreadPool& pool) {
  const BuiltObjective obj = build_objective(cfg.objective);
  if (obj.benchmark) return detail::execute_with_problem(*obj.benchmark, cfg, pool);
  return detail::execute_with_problem(*obj.mlp, cfg, pool);
}

/// Runs the experiment and writes metrics.csv, generations.csv (population
/// learner only) and one checkpoint per seed into cfg.out_dir.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, ThreadPool& pool) {
  const ExperimentResult result = execute_experiment(cfg, pool);
  std::filesystem::create_directories(cfg.out_dir);

  CsvWriter metrics(cfg.out_dir + "/metrics.csv", MetricsRecord::header());
  for (const auto& seed_run : result.seeds) {
    for (const auto& m : seed_run.metrics) metrics.row(m.fields());
  }

  if (cfg.algorithm == "gadam") {
    CsvWriter gens(cfg.out_dir + "/generations.csv",
                   {"seed", "generation", "parent_total", "survivor_total",
                    "best_loss", "children_adopted", "wall_ms"});
    for (const auto& seed_run : result.seeds) {
      for (const auto& rec : seed_run.generations) {
        gens.row({std::to_string(seed_run.seed), std::to_string(rec.generation),
                  format_double(rec.parent_total), format_double(rec.survivor_total),
                  format_double(rec.best_loss), std::to_string(rec.children_adopted),
                  format_double(rec.wall_ms)});
      }
    }
  }

  for (const auto& seed_run : result.seeds) {
    save_params(cfg.out_dir + "/checkpoint_seed" + std::to_string(seed_run.seed) + ".params",
                seed_run.best_w);
  }
  return result;
}

// --- cross-algorithm comparison ----------------------------------------------

struct CompareRow {
  std::string algorithm;
  std::size_t seed_count = 0;
  double mean_test_accuracy = std::numeric_limits<double>::quiet_NaN();
  double std_test_accuracy = std::numeric_limits<double>::quiet_NaN();
  double mean_test_loss = std::numeric_limits<double>::quiet_NaN();
  double std_test_loss = std::numeric_limits<double>::quiet_NaN();
  double mean_val_loss = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline std::pair<double, double> mean_std(const std::vector<double>& xs) {
  if (xs.empty()) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() == 1) return {mean, 0.0};
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(xs.size() - 1);
  return {mean, std::sqrt(var)};
}

inline std::string objective_signature(const ObjectiveConfig& o) {
  std::ostringstream s;
  if (o.kind == ObjectiveConfig::Kind::Benchmark) {
    s << "benchmark:" << o.benchmark;
    return s.str();
  }
  const auto& d = o.data;
  s << "dataset:" << static_cast<int>(d.format) << ':' << d.schema << ':' << d.path
    << ':' << d.images_path << ':' << d.test_images_path << ':' << d.subsample
    << ':' << d.train_fraction << ':' << d.per_class << ':' << d.split_seed << ':'
    << d.standardize << ':' << d.synthetic_rows << ':' << d.synthetic_cols << ':'
    << d.synthetic_classes << ':' << d.synthetic_seed << ":mlp";
  for (std::size_t l : o.mlp_layers) s << ',' << l;
  s << ':' << static_cast<int>(o.activation) << ':' << static_cast<int>(o.output)
    << ':' << static_cast<int>(o.init);
  return s.str();
}

}  // namespace detail

/// Runs every config over the first config's seed list (all must share the
/// objective) and summarizes final test accuracy / loss per algorithm.
inline std::vector<CompareRow> compare_algorithms(std::vector<ExperimentConfig> cfgs,
                                                  ThreadPool& pool) {
  if (cfgs.empty()) throw ConfigError("compare: need at least one config");
  const std::string sig = detail::objective_signature(cfgs.front().objective);
  for (const auto& c : cfgs) {
    if (detail::objective_signature(c.objective) != sig) {
      throw ConfigError("compare: configs target different objectives");
    }
  }
  std::vector<CompareRow> rows;
  for (auto& c : cfgs) {
    c.seeds = cfgs.front().seeds;  // shared seed sweep
    const ExperimentResult res = execute_experiment(c, pool);
    CompareRow row;
    row.algorithm = c.algorithm;
    row.seed_count = res.seeds.size();
    std::vector<double> accs, tlosses, vlosses;
    for (const auto& s : res.seeds) {
      if (!std::isnan(s.test_accuracy)) accs.push_back(s.test_accuracy);
      if (!std::isnan(s.test_loss)) tlosses.push_back(s.test_loss);
      vlosses.push_back(s.val_loss);
    }
    std::tie(row.mean_test_accuracy, row.std_test_accuracy) = detail::mean_std(accs);
    std::tie(row.mean_test_loss, row.std_test_loss) = detail::mean_std(tlosses);
    row.mean_val_loss = detail::mean_std(vlosses).first;
    rows.push_back(std::move(row));
  }
  return rows;
}

inline void write_compare_csv(const std::string& path, const std::vector<CompareRow>& rows) {
  CsvWriter out(path, {"algorithm", "seeds", "mean_test_accuracy", "std_test_accuracy",
                       "mean_test_loss", "std_test_loss", "mean_val_loss"});
  for (const auto& r : rows) {
    out.row({r.algorithm, std::to_string(r.seed_count),
             format_double(r.mean_test_accuracy), format_double(r.std_test_accuracy),
             format_double(r.mean_test_loss), format_double(r.std_test_loss),
             format_double(r.mean_val_loss)});
  }
}

// --- parallel efficiency -----------------------------------------------------

struct ThreadTiming {
  unsigned threads = 1;
  double total_ms = 0.0;
  double mean_generation_ms = 0.0;
  bool identical_result = true;  // outputs match the 1-thread reference
};

/// Times the population learner at each worker count and verifies that every
/// count reproduces the same models, generation records and best weights.
inline std::vector<ThreadTiming> measure_parallel_efficiency(
    const ExperimentConfig& cfg, const std::vector<unsigned>& thread_counts) {
  if (cfg.algorithm != "gadam") {
    throw ConfigError("bench-parallel: config must use the gadam algorithm");
  }
  if (thread_counts.empty()) throw ConfigError("bench-parallel: no thread counts");
  const BuiltObjective obj = build_objective(cfg.objective);

  std::vector<ThreadTiming> out;
  std::optional<ExperimentResult> reference;
  for (const unsigned t : thread_counts) {
    ThreadPool pool(t);
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentResult res = obj.benchmark
        ? detail::execute_with_problem(*obj.benchmark, cfg, pool)
        : detail::execute_with_problem(*obj.mlp, cfg, pool);
    ThreadTiming timing;
    timing.threads = t;
    timing.total_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0).count();
    double gen_ms = 0.0;
    std::size_t gens = 0;
    for (const auto& s : res.seeds) {
      for (const auto& rec : s.generations) {
        gen_ms += rec.wall_ms;
        ++gens;
      }
    }
    timing.mean_generation_ms = gens ? gen_ms / static_cast<double>(gens) : 0.0;

    if (!reference) {
      reference = res;
    } else {
      bool same = reference->seeds.size() == res.seeds.size();
      for (std::size_t i = 0; same && i < res.seeds.size(); ++i) {
        const auto& a = reference->seeds[i];
        const auto& b = res.seeds[i];
        same = a.best_w == b.best_w && a.generations.size() == b.generations.size();
        for (std::size_t k = 0; same && k < a.generations.size(); ++k) {
          same = a.generations[k].survivor_ids == b.generations[k].survivor_ids &&
                 a.generations[k].trained_losses == b.generations[k].trained_losses &&
                 a.generations[k].survivor_total == b.generations[k].survivor_total;
        }
      }
      timing.identical_result = same;
    }
    out.push_back(timing);
  }
  return out;
}

inline void write_timing_csv(const std::string& path, const std::vector<ThreadTiming>& rows) {
  CsvWriter out(path, {"threads", "total_ms", "mean_generation_ms", "identical_result"});
  for (const auto& r : rows) {
    out.row({std::to_string(r.threads), format_double(r.total_ms),
             format_double(r.mean_generation_ms), r.identical_result ? "1" : "0"});
  }
}

}  // namespace evoptim
