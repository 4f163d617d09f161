#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "evoptim/error.hpp"
#include "evoptim/optimizers.hpp"
#include "evoptim/params.hpp"
#include "evoptim/problem.hpp"
#include "evoptim/rng.hpp"
#include "evoptim/thread_pool.hpp"

namespace evoptim {

enum class MutationDist { Uniform01, StandardNormal };

/// Knobs of the population learner: population size g, generation budget K,
/// base mutation rate p, stop threshold theta, per-generation Adam step
/// budget, batch sizes and the master seed everything derives from.
struct EvolutionConfig {
  std::size_t population_size = 10;      // g
  std::size_t max_generations = 5;       // K
  double base_mutation_rate = 0.01;      // p
  double stop_threshold = 0.0;           // theta
  std::size_t train_steps = 100;         // Adam steps per model per generation
  std::size_t batch_size = 128;
  std::size_t validation_batch_size = 256;
  std::uint64_t master_seed = 0;
  MutationDist mutation_dist = MutationDist::Uniform01;
  AdamConfig adam{};

  void validate() const {
    if (population_size < 2) throw ConfigError("evolution: population size must be >= 2");
    if (max_generations < 1) throw ConfigError("evolution: max generations must be >= 1");
    if (!(base_mutation_rate >= 0.0 && base_mutation_rate <= 1.0)) {
      throw ConfigError("evolution: base mutation rate outside [0,1]");
    }
    if (!(stop_threshold >= 0.0)) throw ConfigError("evolution: stop threshold must be >= 0");
    if (train_steps < 1) throw ConfigError("evolution: train steps must be >= 1");
    if (batch_size < 1 || validation_batch_size < 1) {
      throw ConfigError("evolution: batch sizes must be >= 1");
    }
  }
};

enum class LineageKind { Initial, Survivor, Child };

struct Lineage {
  LineageKind kind = LineageKind::Initial;
  std::uint64_t parent_a = 0;
  std::uint64_t parent_b = 0;
};

/// One member of the population: its flat weights, its own Adam state (which
/// persists across the generations it survives) and its own random stream
/// for batch sampling, derived from (master seed, id). Ids are unique for
/// the life of a run.
struct UnitModel {
  std::uint64_t id = 0;
  ParamVector w;
  AdamState opt;
  Lineage lineage;
  RngStream rng;
};

/// Losses of one generation on a shared validation batch plus the derived
/// selection quantities.
struct FitnessReport {
  std::vector<double> raw_losses;         // summed batch loss per model
  std::vector<double> normalized_losses;  // min-max normalized, in [0,1]
  std::vector<double> selection_probs;    // softmax of -normalized, sums to 1
};

/// Bookkeeping of one generation round.
struct GenerationRecord {
  std::size_t generation = 0;             // 1-based round index
  std::vector<double> entry_losses;       // models on the fitness batch, before training
  std::vector<double> trained_losses;     // same batch, after this round's training
  std::vector<double> final_train_losses; // each parent's last training-batch loss
  std::vector<std::uint64_t> survivor_ids;
  std::size_t children_adopted = 0;
  double parent_total = 0.0;    // trained parents' summed loss on the selection batch
  double survivor_total = 0.0;  // survivors' summed loss on the same batch
  double best_loss = 0.0;       // lowest candidate loss on the selection batch
  std::size_t selection_rows = 0;
  double wall_ms = 0.0;
};

namespace detail {

constexpr std::uint64_t kCoordinatorStream = ~std::uint64_t{0};

template <OptimizableProblem P>
std::vector<double> eval_fitness_sums(const std::vector<UnitModel>& models,
                                      const P& problem, const Batch& batch,
                                      ThreadPool& pool) {
  std::vector<double> out(models.size());
  pool.run_indexed(models.size(), [&](std::size_t i) {
    out[i] = problem.fitness_sum(models[i].w, batch);
  });
  return out;
}

}  // namespace detail

/// g models with independently seeded parameters and streams, fresh Adam
/// state, lineage Initial. Identical for every thread count by construction.
template <OptimizableProblem P>
std::vector<UnitModel> init_population(const P& problem, const EvolutionConfig& cfg) {
  cfg.validate();
  std::vector<UnitModel> models;
  models.reserve(cfg.population_size);
  for (std::size_t i = 0; i < cfg.population_size; ++i) {
    UnitModel m;
    m.id = i;
    m.rng = RngStream(derive_seed(cfg.master_seed, i));
    m.w = problem.initial_params(m.rng);
    m.opt = AdamState::fresh(m.w.size(), cfg.adam);
    m.lineage = Lineage{LineageKind::Initial, 0, 0};
    models.push_back(std::move(m));
  }
  return models;
}

/// Advances every model by cfg.train_steps Adam steps, each on a batch the
/// model samples from its own stream. Returns each model's last batch loss.
/// A numeric failure aborts the round naming the model.
template <OptimizableProblem P>
std::vector<double> train_generation(std::vector<UnitModel>& models, const P& problem,
                                     const EvolutionConfig& cfg, ThreadPool& pool) {
  std::vector<double> last_loss(models.size(),
                                std::numeric_limits<double>::quiet_NaN());
  pool.run_indexed(models.size(), [&](std::size_t i) {
    UnitModel& m = models[i];
    try {
      ParamVector grad;
      for (std::size_t step = 0; step < cfg.train_steps; ++step) {
        const Batch batch = problem.sample_train_batch(cfg.batch_size, m.rng);
        last_loss[i] = problem.loss_and_grad(m.w, batch, grad);
        adam_step(m.w, grad, m.opt);
      }
    } catch (const std::exception& e) {
      throw NumericError("training model " + std::to_string(m.id) + ": " + e.what());
    }
  });
  return last_loss;
}

/// Summed loss per model on one shared validation batch, min-max normalized
/// into [0,1] (an all-equal generation normalizes to all zeros), and the
/// softmax selection probabilities over the negated normalized losses.
template <OptimizableProblem P>
FitnessReport evaluate_fitness(const std::vector<UnitModel>& models, const P& problem,
                               const Batch& validation_batch, ThreadPool& pool) {
  if (models.empty()) throw ConfigError("evaluate_fitness: empty population");
  FitnessReport report;
  report.raw_losses = detail::eval_fitness_sums(models, problem, validation_batch, pool);
  const auto [lo_it, hi_it] =
      std::minmax_element(report.raw_losses.begin(), report.raw_losses.end());
  const double lo = *lo_it, hi = *hi_it;
  report.normalized_losses.resize(report.raw_losses.size());
  if (hi > lo) {
    for (std::size_t i = 0; i < report.raw_losses.size(); ++i) {
      report.normalized_losses[i] = (report.raw_losses[i] - lo) / (hi - lo);
    }
  }  // else: all zeros, softmax becomes uniform
  report.selection_probs.resize(report.normalized_losses.size());
  double total = 0.0;
  for (std::size_t i = 0; i < report.normalized_losses.size(); ++i) {
    report.selection_probs[i] = std::exp(-report.normalized_losses[i]);
    total += report.selection_probs[i];
  }
  for (auto& p : report.selection_probs) p /= total;
  return report;
}

/// g ordered parent pairs drawn with replacement from the selection
/// distribution; a model may be paired with itself.
inline std::vector<std::pair<std::size_t, std::size_t>> select_pairs(
    const FitnessReport& report, std::size_t g, RngStream& rng) {
  const std::vector<double>& probs = report.selection_probs;
  std::vector<double> cdf(probs.size());
  std::partial_sum(probs.begin(), probs.end(), cdf.begin());
  cdf.back() = 1.0;  // guard against rounding in the last bucket
  const auto draw = [&]() -> std::size_t {
    const double u = rng.uniform();
    return static_cast<std::size_t>(
        std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
  };
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(g);
  for (std::size_t k = 0; k < g; ++k) {
    const std::size_t a = draw();
    const std::size_t b = draw();
    pairs.emplace_back(a, b);
  }
  return pairs;
}

/// Per-pair inheritance threshold: the probability that an entry comes from
/// the first parent. Equal normalized losses give exactly 1/2; the worse
/// parent always gets less than 1/2.
inline double crossover_threshold(double norm_loss_i, double norm_loss_j) {
  const double ei = std::exp(-norm_loss_i);
  const double ej = std::exp(-norm_loss_j);
  return ei / (ei + ej);
}

/// Entrywise crossover: each child entry is copied from the first parent if
/// an independent uniform draw falls at or below the threshold, else from
/// the second.
inline ParamVector crossover(const ParamVector& parent_i, const ParamVector& parent_j,
                             double norm_loss_i, double norm_loss_j, RngStream& rng) {
  check_same_size(parent_i, parent_j, "crossover");
  const double threshold = crossover_threshold(norm_loss_i, norm_loss_j);
  ParamVector child(parent_i.size());
  for (std::size_t m = 0; m < child.size(); ++m) {
    child[m] = rng.uniform() <= threshold ? parent_i[m] : parent_j[m];
  }
  return child;
}

/// Effective mutation rate: the base rate damped by the parents' combined
/// selection probability, so children of strong parents mutate less.
inline double mutation_rate(double base_rate, double prob_i, double prob_j) {
  if (prob_i < 0.0 || prob_j < 0.0 || prob_i + prob_j > 1.0 + 1e-12) {
    throw ConfigError("mutation_rate: parent probabilities must be >= 0 and sum to <= 1");
  }
  return base_rate * (1.0 - prob_i - prob_j);
}

/// Entrywise mutation in place. One uniform draw per entry decides: at or
/// below the effective rate the entry is replaced by a fresh draw from the
/// configured replacement distribution, otherwise it is kept.
inline void mutate(ParamVector& child, double prob_i, double prob_j,
                   const EvolutionConfig& cfg, RngStream& rng) {
  const double rate = mutation_rate(cfg.base_mutation_rate, prob_i, prob_j);
  for (auto& entry : child) {
    if (rng.uniform() <= rate) {
      entry = cfg.mutation_dist == MutationDist::Uniform01 ? rng.uniform() : rng.normal();
    }
  }
}

/// Scores all 2g candidates on one freshly sampled shared batch and keeps
/// the g lowest-loss models, ties broken by (loss, parents before children,
/// id). Returns the next generation sorted best-first plus the record of the
/// round. The survivor set attains the minimum possible summed loss of any
/// g-subset, since per-model scores do not depend on which peers survive.
template <OptimizableProblem P>
std::pair<std::vector<UnitModel>, GenerationRecord> select_survivors(
    std::vector<UnitModel>&& trained_parents, std::vector<UnitModel>&& trained_children,
    const P& problem, const Batch& selection_batch, ThreadPool& pool) {
  const std::size_t g = trained_parents.size();
  std::vector<UnitModel> candidates = std::move(trained_parents);
  candidates.reserve(2 * g);
  for (auto& c : trained_children) candidates.push_back(std::move(c));

  std::vector<double> losses =
      detail::eval_fitness_sums(candidates, problem, selection_batch, pool);

  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (losses[a] != losses[b]) return losses[a] < losses[b];
    const bool a_child = a >= g, b_child = b >= g;
    if (a_child != b_child) return !a_child;
    return candidates[a].id < candidates[b].id;
  });

  GenerationRecord rec;
  rec.selection_rows = selection_batch.rows;
  rec.parent_total = std::accumulate(losses.begin(), losses.begin() + static_cast<std::ptrdiff_t>(g), 0.0);
  rec.best_loss = losses[order.front()];

  std::vector<UnitModel> next;
  next.reserve(g);
  for (std::size_t rank = 0; rank < g; ++rank) {
    const std::size_t idx = order[rank];
    rec.survivor_total += losses[idx];
    UnitModel& m = candidates[idx];
    if (idx < g) {
      m.lineage.kind = LineageKind::Survivor;
    } else {
      ++rec.children_adopted;
    }
    rec.survivor_ids.push_back(m.id);
    next.push_back(std::move(m));
  }
  return {std::move(next), std::move(rec)};
}

/// Stop rule: stop once the round budget is reached, or when consecutive
/// generations' summed selection-time losses differ by at most the
/// threshold. The first round has no predecessor record, so it compares the
/// trained parents' total against the survivors' total on the same batch.
inline bool should_stop(const GenerationRecord* prev, const GenerationRecord& curr,
                        const EvolutionConfig& cfg, std::size_t completed_rounds) {
  if (completed_rounds >= cfg.max_generations) return true;
  const double prev_total = prev ? prev->survivor_total : curr.parent_total;
  return std::abs(prev_total - curr.survivor_total) <= cfg.stop_threshold;
}

struct EvolutionResult {
  UnitModel best;
  std::vector<GenerationRecord> history;
  std::vector<UnitModel> final_generation;  // sorted best-first
};

/// The full generation loop.
///
/// Each round: sample a fitness batch, score the entering models on it,
/// train every model, score again (these are the selection weights), and —
/// unless this is the last budgeted round — breed g children by pair
/// selection / crossover / mutation, train them from fresh Adam state, then
/// keep the best g of all 2g on a new shared batch. The genetic phase runs
/// single-threaded on the coordinator stream; training and scoring fan out
/// over the pool. Everything derives from cfg.master_seed, so results are
/// identical for every pool width.
template <OptimizableProblem P>
EvolutionResult run_evolution(const P& problem, const EvolutionConfig& cfg,
                              ThreadPool& pool) {
  cfg.validate();
  std::vector<UnitModel> models = init_population(problem, cfg);
  RngStream coord(derive_seed(cfg.master_seed, detail::kCoordinatorStream));
  std::uint64_t next_id = cfg.population_size;
  const std::size_t g = cfg.population_size;

  EvolutionResult result;
  for (std::size_t round = 1; round <= cfg.max_generations; ++round) {
    const auto t0 = std::chrono::steady_clock::now();
    const Batch fitness_batch =
        problem.sample_validation_batch(cfg.validation_batch_size, coord);

    GenerationRecord rec;
    rec.generation = round;
    rec.entry_losses = detail::eval_fitness_sums(models, problem, fitness_batch, pool);
    rec.final_train_losses = train_generation(models, problem, cfg, pool);
    const FitnessReport report = evaluate_fitness(models, problem, fitness_batch, pool);
    rec.trained_losses = report.raw_losses;

    if (round == cfg.max_generations) {
      // Budget exhausted: the trained parents are the final generation and
      // the fitness batch doubles as the shared comparison batch.
      std::vector<std::size_t> order(models.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (report.raw_losses[a] != report.raw_losses[b]) {
          return report.raw_losses[a] < report.raw_losses[b];
        }
        return models[a].id < models[b].id;
      });
      rec.selection_rows = fitness_batch.rows;
      rec.parent_total = std::accumulate(report.raw_losses.begin(), report.raw_losses.end(), 0.0);
      rec.survivor_total = rec.parent_total;
      rec.best_loss = report.raw_losses[order.front()];
      for (std::size_t rank = 0; rank < order.size(); ++rank) {
        rec.survivor_ids.push_back(models[order[rank]].id);
      }
      rec.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0).count();
      result.history.push_back(std::move(rec));
      std::vector<UnitModel> ordered;
      ordered.reserve(models.size());
      for (std::size_t rank = 0; rank < order.size(); ++rank) {
        ordered.push_back(std::move(models[order[rank]]));
      }
      result.final_generation = std::move(ordered);
      break;
    }

    const auto pairs = select_pairs(report, g, coord);
    std::vector<UnitModel> children;
    children.reserve(g);
    for (const auto& [i, j] : pairs) {
      ParamVector cw = crossover(models[i].w, models[j].w, report.normalized_losses[i],
                                 report.normalized_losses[j], coord);
      mutate(cw, report.selection_probs[i], report.selection_probs[j], cfg, coord);
      UnitModel child;
      child.id = next_id++;
      child.rng = RngStream(derive_seed(cfg.master_seed, child.id));
      child.opt = AdamState::fresh(cw.size(), cfg.adam);  // spliced weights: moments restart
      child.w = std::move(cw);
      child.lineage = Lineage{LineageKind::Child, models[i].id, models[j].id};
      children.push_back(std::move(child));
    }
    train_generation(children, problem, cfg, pool);

    const Batch selection_batch =
        problem.sample_validation_batch(cfg.validation_batch_size, coord);
    auto [next_gen, sel_rec] = select_survivors(std::move(models), std::move(children),
                                                problem, selection_batch, pool);
    rec.survivor_ids = std::move(sel_rec.survivor_ids);
    rec.children_adopted = sel_rec.children_adopted;
    rec.parent_total = sel_rec.parent_total;
    rec.survivor_total = sel_rec.survivor_total;
    rec.best_loss = sel_rec.best_loss;
    rec.selection_rows = sel_rec.selection_rows;
    rec.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0).count();
    result.history.push_back(std::move(rec));
    models = std::move(next_gen);

    const GenerationRecord* prev =
        result.history.size() >= 2 ? &result.history[result.history.size() - 2] : nullptr;
    if (should_stop(prev, result.history.back(), cfg, round)) {
      result.final_generation = std::move(models);
      break;
    }
  }
  if (result.final_generation.empty()) result.final_generation = std::move(models);
  result.best = result.final_generation.front();
  return result;
}

}  // namespace evoptim
