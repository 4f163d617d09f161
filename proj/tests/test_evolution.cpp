#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <vector>

#include "evoptim/evolution.hpp"
#include "evoptim/experiment.hpp"
#include "test_problems.hpp"

using namespace evoptim;
using evoptim::testing::QuadraticProblem;

namespace {

EvolutionConfig small_config() {
  EvolutionConfig cfg;
  cfg.population_size = 4;
  cfg.max_generations = 3;
  cfg.train_steps = 20;
  cfg.batch_size = 8;
  cfg.validation_batch_size = 16;
  cfg.master_seed = 7;
  return cfg;
}

FitnessReport report_from_normalized(std::vector<double> normalized) {
  FitnessReport r;
  r.raw_losses = normalized;
  r.normalized_losses = std::move(normalized);
  r.selection_probs.resize(r.normalized_losses.size());
  double total = 0.0;
  for (std::size_t i = 0; i < r.normalized_losses.size(); ++i) {
    r.selection_probs[i] = std::exp(-r.normalized_losses[i]);
    total += r.selection_probs[i];
  }
  for (auto& p : r.selection_probs) p /= total;
  return r;
}

}  // namespace

// ---- population initialization ------------------------------------------------

TEST(InitPopulation, DistinctAndReproducible) {
  const QuadraticProblem problem({0.0, 0.0, 0.0});
  EvolutionConfig cfg = small_config();
  cfg.population_size = 2;
  const auto a = init_population(problem, cfg);
  const auto b = init_population(problem, cfg);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_NE(a[0].w, a[1].w);
  EXPECT_EQ(a[0].w, b[0].w);
  EXPECT_EQ(a[1].w, b[1].w);
  EXPECT_EQ(a[0].lineage.kind, LineageKind::Initial);
}

TEST(InitPopulation, UniqueIds) {
  const QuadraticProblem problem({1.0});
  EvolutionConfig cfg = small_config();
  cfg.population_size = 10;
  const auto models = init_population(problem, cfg);
  std::set<std::uint64_t> ids;
  for (const auto& m : models) ids.insert(m.id);
  EXPECT_EQ(ids.size(), 10u);
}

TEST(InitPopulation, ConfigValidation) {
  const QuadraticProblem problem({1.0});
  EvolutionConfig cfg = small_config();
  cfg.population_size = 1;
  EXPECT_THROW(init_population(problem, cfg), ConfigError);
  cfg = small_config();
  cfg.base_mutation_rate = 1.5;
  EXPECT_THROW(init_population(problem, cfg), ConfigError);
  cfg = small_config();
  cfg.max_generations = 0;
  EXPECT_THROW(init_population(problem, cfg), ConfigError);
}

// ---- training -------------------------------------------------------------------

TEST(TrainGeneration, ZeroStepsLeaveModelsUnchanged) {
  const QuadraticProblem problem({2.0, -1.0});
  EvolutionConfig cfg = small_config();
  auto models = init_population(problem, cfg);
  const auto snapshot = models;
  cfg.train_steps = 0;
  ThreadPool pool(1);
  train_generation(models, problem, cfg, pool);
  for (std::size_t i = 0; i < models.size(); ++i) {
    EXPECT_EQ(models[i].w, snapshot[i].w);
    EXPECT_EQ(models[i].opt.k, 0u);
  }
}

TEST(TrainGeneration, ConvexObjectiveReachesVanishingGradient) {
  const QuadraticProblem problem({0.3, -0.7, 1.1});
  EvolutionConfig cfg = small_config();
  cfg.population_size = 2;
  cfg.train_steps = 8000;
  cfg.adam.eta = 0.01;
  auto models = init_population(problem, cfg);
  ThreadPool pool(1);
  train_generation(models, problem, cfg, pool);
  ParamVector grad;
  problem.loss_and_grad(models[0].w, Batch{}, grad);
  double norm = 0.0;
  for (double g : grad) norm += g * g;
  EXPECT_LT(std::sqrt(norm), 1e-4);
}

TEST(TrainGeneration, TrainingImprovesSeparableToyProblem) {
  // Linear softmax model on well-separated blobs: after a round of training
  // the loss on a fixed evaluation batch should drop in nearly every seed.
  int improved = 0;
  const int seeds = 100;
  for (int seed = 0; seed < seeds; ++seed) {
    const Dataset data = synthetic_classification(120, 2, 2,
                                                  static_cast<std::uint64_t>(seed), 4.0);
    const MlpShape shape({2, 2}, Activation::Relu, OutputKind::SoftmaxCrossEntropy);
    const MlpProblem problem(shape, &data, &data);
    EvolutionConfig cfg = small_config();
    cfg.master_seed = static_cast<std::uint64_t>(seed);
    cfg.population_size = 2;
    cfg.train_steps = 50;
    cfg.batch_size = 32;
    auto models = init_population(problem, cfg);
    RngStream eval_rng(derive_seed(static_cast<std::uint64_t>(seed), 999));
    const Batch eval = problem.sample_validation_batch(64, eval_rng);
    const double before = problem.mean_loss(models[0].w, eval);
    ThreadPool pool(1);
    train_generation(models, problem, cfg, pool);
    const double after = problem.mean_loss(models[0].w, eval);
    if (after <= before) ++improved;
  }
  EXPECT_GE(improved, 95);
}

// ---- fitness --------------------------------------------------------------------

TEST(Fitness, EqualLossesGiveUniformProbabilities) {
  const QuadraticProblem problem({0.0});
  EvolutionConfig cfg = small_config();
  auto models = init_population(problem, cfg);
  for (auto& m : models) m.w = {1.0};  // identical, so identical losses
  ThreadPool pool(1);
  const FitnessReport r = evaluate_fitness(models, problem, Batch{}, pool);
  for (double nl : r.normalized_losses) EXPECT_EQ(nl, 0.0);
  for (double p : r.selection_probs) EXPECT_DOUBLE_EQ(p, 0.25);
}

TEST(Fitness, TwoModelHandValues) {
  // normalized losses [0, 1] give probabilities [e^0, e^-1] / (e^0 + e^-1)
  const QuadraticProblem problem({0.0});
  EvolutionConfig cfg = small_config();
  cfg.population_size = 2;
  auto models = init_population(problem, cfg);
  models[0].w = {1.0};
  models[1].w = {2.0};
  ThreadPool pool(1);
  const FitnessReport r = evaluate_fitness(models, problem, Batch{}, pool);
  EXPECT_EQ(r.normalized_losses[0], 0.0);
  EXPECT_EQ(r.normalized_losses[1], 1.0);
  EXPECT_NEAR(r.selection_probs[0], 0.7311, 1e-4);
  EXPECT_NEAR(r.selection_probs[1], 0.2689, 1e-4);
  EXPECT_NEAR(r.selection_probs[0], 0.7310585786300049, 1e-12);
}

TEST(Fitness, ProbabilitiesNormalizedPositiveAndAntiMonotone) {
  const QuadraticProblem problem({0.0, 0.0});
  EvolutionConfig cfg = small_config();
  cfg.population_size = 8;
  auto models = init_population(problem, cfg);
  ThreadPool pool(1);
  const FitnessReport r = evaluate_fitness(models, problem, Batch{}, pool);
  double sum = 0.0;
  for (double p : r.selection_probs) {
    EXPECT_GT(p, 0.0);
    sum += p;
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
  for (double nl : r.normalized_losses) {
    EXPECT_GE(nl, 0.0);
    EXPECT_LE(nl, 1.0);
  }
  for (std::size_t i = 0; i < r.raw_losses.size(); ++i) {
    for (std::size_t j = 0; j < r.raw_losses.size(); ++j) {
      if (r.raw_losses[i] < r.raw_losses[j]) {
        EXPECT_GE(r.selection_probs[i], r.selection_probs[j]);
      }
    }
  }
}

// ---- parent pair selection --------------------------------------------------------

TEST(SelectPairs, DegenerateDistributionPicksTheOnlyParent) {
  FitnessReport r;
  r.raw_losses = {0.0, 1.0, 2.0};
  r.normalized_losses = {0.0, 0.5, 1.0};
  r.selection_probs = {1.0, 0.0, 0.0};
  RngStream rng(3);
  const auto pairs = select_pairs(r, 5, rng);
  ASSERT_EQ(pairs.size(), 5u);
  for (const auto& [a, b] : pairs) {
    EXPECT_EQ(a, 0u);
    EXPECT_EQ(b, 0u);
  }
}

TEST(SelectPairs, UniformMarginalsWithinThreeSigma) {
  const std::size_t g = 5;
  const FitnessReport r = report_from_normalized(std::vector<double>(g, 0.0));
  RngStream rng(11);
  std::vector<int> counts(g, 0);
  const int draws = 5000;  // pairs; 2 draws per pair
  for (int i = 0; i < draws; ++i) {
    const auto pairs = select_pairs(r, 1, rng);
    counts[pairs[0].first]++;
    counts[pairs[0].second]++;
  }
  const double n = 2.0 * draws;
  const double expected = n / g;
  const double sigma = std::sqrt(n * (1.0 / g) * (1.0 - 1.0 / g));
  for (int c : counts) EXPECT_NEAR(static_cast<double>(c), expected, 3.0 * sigma);
}

// ---- crossover --------------------------------------------------------------------

TEST(Crossover, ThresholdSymmetricAndBiased) {
  EXPECT_DOUBLE_EQ(crossover_threshold(0.4, 0.4), 0.5);
  EXPECT_DOUBLE_EQ(crossover_threshold(0.0, 0.0), 0.5);
  // first parent worse (higher normalized loss): threshold below one half
  const double t = crossover_threshold(0.9, 0.1);
  EXPECT_GT(t, 0.0);
  EXPECT_LT(t, 0.5);
  EXPECT_GT(crossover_threshold(0.1, 0.9), 0.5);
}

TEST(Crossover, ChildEntriesComeFromParents) {
  RngStream rng(19);
  ParamVector a(64), b(64);
  for (std::size_t i = 0; i < 64; ++i) {
    a[i] = static_cast<double>(i);
    b[i] = -static_cast<double>(i) - 1.0;
  }
  const ParamVector child = crossover(a, b, 0.3, 0.6, rng);
  ASSERT_EQ(child.size(), 64u);
  bool from_a = false, from_b = false;
  for (std::size_t i = 0; i < 64; ++i) {
    EXPECT_TRUE(child[i] == a[i] || child[i] == b[i]);
    from_a |= child[i] == a[i];
    from_b |= child[i] == b[i];
  }
  EXPECT_TRUE(from_a);
  EXPECT_TRUE(from_b);
}

// ---- mutation ---------------------------------------------------------------------

TEST(Mutation, RateFollowsParentQuality) {
  EXPECT_DOUBLE_EQ(mutation_rate(0.0, 0.3, 0.3), 0.0);
  EXPECT_DOUBLE_EQ(mutation_rate(0.01, 0.5, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(mutation_rate(0.01, 0.2, 0.3), 0.01 * 0.5);
  EXPECT_THROW(mutation_rate(0.01, 0.8, 0.4), ConfigError);
  EXPECT_THROW(mutation_rate(0.01, -0.1, 0.0), ConfigError);
}

TEST(Mutation, ZeroRateLeavesChildAlone) {
  EvolutionConfig cfg = small_config();
  cfg.base_mutation_rate = 0.0;
  RngStream rng(23);
  ParamVector child = {1.0, 2.0, 3.0};
  const ParamVector before = child;
  mutate(child, 0.2, 0.3, cfg, rng);
  EXPECT_EQ(child, before);

  cfg.base_mutation_rate = 0.5;
  mutate(child, 0.5, 0.5, cfg, rng);  // parents own all the probability mass
  EXPECT_EQ(child, before);
}

TEST(Mutation, FullReplacementStaysInUnitInterval) {
  EvolutionConfig cfg = small_config();
  cfg.base_mutation_rate = 1.0;
  cfg.mutation_dist = MutationDist::Uniform01;
  RngStream rng(29);
  ParamVector child(256, 100.0);
  mutate(child, 0.0, 0.0, cfg, rng);
  for (double x : child) {
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
}

TEST(Mutation, EmpiricalRateWithinThreeSigma) {
  EvolutionConfig cfg = small_config();
  cfg.base_mutation_rate = 0.4;
  RngStream rng(31);
  const std::size_t n = 100000;
  ParamVector child(n, 42.0);
  mutate(child, 0.125, 0.125, cfg, rng);  // effective rate 0.3
  std::size_t mutated = 0;
  for (double x : child) {
    if (x != 42.0) ++mutated;
  }
  const double p = 0.3;
  const double sigma = std::sqrt(static_cast<double>(n) * p * (1 - p));
  EXPECT_NEAR(static_cast<double>(mutated), p * static_cast<double>(n), 3.0 * sigma);
}

TEST(Mutation, NormalReplacementDraws) {
  EvolutionConfig cfg = small_config();
  cfg.base_mutation_rate = 1.0;
  cfg.mutation_dist = MutationDist::StandardNormal;
  RngStream rng(37);
  ParamVector child(1000, 100.0);
  mutate(child, 0.0, 0.0, cfg, rng);
  int outside_unit = 0;
  for (double x : child) {
    EXPECT_NE(x, 100.0);
    if (x < 0.0 || x >= 1.0) ++outside_unit;
  }
  EXPECT_GT(outside_unit, 100);  // normal draws leave [0,1) often
}

// ---- survivor selection --------------------------------------------------------------

namespace {

std::vector<UnitModel> models_with_values(const std::vector<double>& values,
                                          std::uint64_t first_id) {
  std::vector<UnitModel> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    UnitModel m;
    m.id = first_id + i;
    m.w = {values[i]};
    m.opt = AdamState::fresh(1);
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace

TEST(SelectSurvivors, AllChildrenWorseMeansZeroAdoption) {
  // Quadratic centered at 0: loss = w^2/2, so larger |w| is worse.
  const QuadraticProblem problem({0.0});
  ThreadPool pool(1);
  auto parents = models_with_values({0.1, 0.2, 0.3}, 0);
  auto children = models_with_values({1.0, 2.0, 3.0}, 10);
  const auto [next, rec] =
      select_survivors(std::move(parents), std::move(children), problem, Batch{}, pool);
  EXPECT_EQ(rec.children_adopted, 0u);
  EXPECT_EQ(rec.survivor_ids, (std::vector<std::uint64_t>{0, 1, 2}));
  EXPECT_EQ(next[0].lineage.kind, LineageKind::Survivor);
}

TEST(SelectSurvivors, AllChildrenBetterMeansFullAdoption) {
  const QuadraticProblem problem({0.0});
  ThreadPool pool(1);
  auto parents = models_with_values({1.0, 2.0, 3.0}, 0);
  auto children = models_with_values({0.1, 0.2, 0.3}, 10);
  const auto [next, rec] =
      select_survivors(std::move(parents), std::move(children), problem, Batch{}, pool);
  EXPECT_EQ(rec.children_adopted, 3u);
  EXPECT_EQ(rec.survivor_ids, (std::vector<std::uint64_t>{10, 11, 12}));
}

TEST(SelectSurvivors, MatchesBruteForceSubsetMinimum) {
  const QuadraticProblem problem({0.0});
  ThreadPool pool(1);
  RngStream rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> parent_vals(3), child_vals(3);
    for (auto& v : parent_vals) v = rng.normal();
    for (auto& v : child_vals) v = rng.normal();
    auto parents = models_with_values(parent_vals, 0);
    auto children = models_with_values(child_vals, 10);

    std::vector<double> all_losses;
    for (double v : parent_vals) all_losses.push_back(0.5 * v * v);
    for (double v : child_vals) all_losses.push_back(0.5 * v * v);

    const auto [next, rec] =
        select_survivors(std::move(parents), std::move(children), problem, Batch{}, pool);

    // Exhaustive minimum over all 3-subsets of the 6 candidates. Each
    // subset's sum is taken over its losses in ascending order — the same
    // canonical order the selection uses — so equality is exact.
    double best = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 6; ++a) {
      for (int b = a + 1; b < 6; ++b) {
        for (int c = b + 1; c < 6; ++c) {
          std::array<double, 3> subset = {all_losses[a], all_losses[b], all_losses[c]};
          std::sort(subset.begin(), subset.end());
          best = std::min(best, subset[0] + subset[1] + subset[2]);
        }
      }
    }
    EXPECT_EQ(rec.survivor_total, best);
  }
}

TEST(SelectSurvivors, TiesPreferParentsThenLowerIds) {
  const QuadraticProblem problem({0.0});
  ThreadPool pool(1);
  auto parents = models_with_values({0.5, 0.5}, 0);
  auto children = models_with_values({0.5, 0.5}, 10);
  const auto [next, rec] =
      select_survivors(std::move(parents), std::move(children), problem, Batch{}, pool);
  EXPECT_EQ(rec.survivor_ids, (std::vector<std::uint64_t>{0, 1}));
  EXPECT_EQ(rec.children_adopted, 0u);
}

// ---- stop rule --------------------------------------------------------------------

TEST(ShouldStop, GenerationBudget) {
  EvolutionConfig cfg = small_config();
  cfg.max_generations = 3;
  cfg.stop_threshold = 0.0;
  GenerationRecord rec;
  rec.parent_total = 10.0;
  rec.survivor_total = 5.0;
  EXPECT_FALSE(should_stop(nullptr, rec, cfg, 1));
  EXPECT_TRUE(should_stop(nullptr, rec, cfg, 3));
}

TEST(ShouldStop, SmallImprovementTriggers) {
  EvolutionConfig cfg = small_config();
  cfg.max_generations = 100;
  cfg.stop_threshold = 0.01;
  GenerationRecord prev;
  prev.survivor_total = 10.0;
  GenerationRecord curr;
  curr.survivor_total = 10.005;
  EXPECT_TRUE(should_stop(&prev, curr, cfg, 2));
  curr.survivor_total = 10.5;
  EXPECT_FALSE(should_stop(&prev, curr, cfg, 2));
}

TEST(ShouldStop, InfiniteThresholdStopsImmediately) {
  EvolutionConfig cfg = small_config();
  cfg.max_generations = 100;
  cfg.stop_threshold = std::numeric_limits<double>::infinity();
  GenerationRecord rec;
  rec.parent_total = 10.0;
  rec.survivor_total = 3.0;
  EXPECT_TRUE(should_stop(nullptr, rec, cfg, 1));
}

TEST(ShouldStop, ZeroThresholdKeepsGoingWhileLossesMove) {
  EvolutionConfig cfg = small_config();
  cfg.max_generations = 100;
  cfg.stop_threshold = 0.0;
  GenerationRecord prev;
  prev.survivor_total = 10.0;
  GenerationRecord curr;
  curr.survivor_total = 9.0;
  EXPECT_FALSE(should_stop(&prev, curr, cfg, 5));
  curr.survivor_total = 10.0;
  EXPECT_TRUE(should_stop(&prev, curr, cfg, 5));
}

// ---- full runs --------------------------------------------------------------------

TEST(Run, SingleGenerationEqualsIndependentRunsPlusSelection) {
  const QuadraticProblem problem({0.4, -0.2});
  EvolutionConfig cfg;
  cfg.population_size = 6;
  cfg.max_generations = 1;
  cfg.base_mutation_rate = 0.0;
  cfg.stop_threshold = std::numeric_limits<double>::infinity();
  cfg.train_steps = 40;
  cfg.master_seed = 123;
  ThreadPool pool(2);
  const EvolutionResult res = run_evolution(problem, cfg, pool);
  EXPECT_EQ(res.history.size(), 1u);

  const MultiStartResult base = multi_start_adam(problem, 6, 40, cfg.adam, cfg.batch_size,
                                                 cfg.validation_batch_size, 123, pool);
  const double best_base = *std::min_element(base.final_losses.begin(), base.final_losses.end());
  EXPECT_EQ(res.history.back().best_loss, best_base);
  EXPECT_EQ(res.best.w, base.finals[base.best_index]);
}

TEST(Run, SingleGenerationEqualsMultiStartOnRealData) {
  const Dataset data = synthetic_classification(300, 4, 3, 5);
  const MlpShape shape({4, 8, 3}, Activation::Relu, OutputKind::SoftmaxCrossEntropy);
  const MlpProblem problem(shape, &data, &data);
  EvolutionConfig cfg;
  cfg.population_size = 3;
  cfg.max_generations = 1;
  cfg.train_steps = 30;
  cfg.batch_size = 32;
  cfg.validation_batch_size = 64;
  cfg.master_seed = 9;
  ThreadPool pool(1);
  const EvolutionResult res = run_evolution(problem, cfg, pool);
  const MultiStartResult base = multi_start_adam(problem, 3, 30, cfg.adam, cfg.batch_size,
                                                 cfg.validation_batch_size, 9, pool);
  EXPECT_EQ(res.best.w, base.finals[base.best_index]);
}

TEST(Run, DeterministicHistoryAcrossRepeatsAndThreadCounts) {
  const Dataset data = synthetic_classification(200, 3, 3, 2);
  const MlpShape shape({3, 6, 3}, Activation::Tanh, OutputKind::SoftmaxCrossEntropy);
  const MlpProblem problem(shape, &data, &data);
  EvolutionConfig cfg;
  cfg.population_size = 4;
  cfg.max_generations = 3;
  cfg.train_steps = 15;
  cfg.batch_size = 16;
  cfg.validation_batch_size = 32;
  cfg.master_seed = 77;

  std::vector<EvolutionResult> results;
  for (const unsigned width : {1u, 1u, 4u}) {
    ThreadPool pool(width);
    results.push_back(run_evolution(problem, cfg, pool));
  }
  for (std::size_t i = 1; i < results.size(); ++i) {
    EXPECT_EQ(results[i].best.w, results[0].best.w);
    ASSERT_EQ(results[i].history.size(), results[0].history.size());
    for (std::size_t k = 0; k < results[0].history.size(); ++k) {
      EXPECT_EQ(results[i].history[k].survivor_ids, results[0].history[k].survivor_ids);
      EXPECT_EQ(results[i].history[k].trained_losses, results[0].history[k].trained_losses);
      EXPECT_EQ(results[i].history[k].survivor_total, results[0].history[k].survivor_total);
      EXPECT_EQ(results[i].history[k].children_adopted, results[0].history[k].children_adopted);
    }
  }
}

TEST(Run, InfiniteThresholdStopsAfterFirstEvolutionRound) {
  const QuadraticProblem problem({0.0, 0.0});
  EvolutionConfig cfg = small_config();
  cfg.max_generations = 5;
  cfg.stop_threshold = std::numeric_limits<double>::infinity();
  ThreadPool pool(1);
  const EvolutionResult res = run_evolution(problem, cfg, pool);
  EXPECT_EQ(res.history.size(), 1u);
  EXPECT_EQ(res.final_generation.size(), cfg.population_size);
}

TEST(Run, EvolvedSearchBeatsRestartsOnRastrigin) {
  const BenchmarkProblem problem(rastrigin2d());
  EvolutionConfig cfg;
  cfg.population_size = 8;
  cfg.max_generations = 4;
  cfg.train_steps = 150;
  cfg.base_mutation_rate = 0.1;
  cfg.adam.eta = 0.01;
  cfg.master_seed = 5;
  ThreadPool pool(2);
  const EvolutionResult res = run_evolution(problem, cfg, pool);
  const MultiStartResult base =
      multi_start_adam(problem, 8, 600, cfg.adam, cfg.batch_size,
                       cfg.validation_batch_size, 5, pool);
  const double evolved = problem.fn().value(res.best.w[0], res.best.w[1]);
  const double restarts = base.final_losses[base.best_index];
  EXPECT_LE(evolved, restarts + 1e-9);
}

TEST(Run, RecordsCarryPrePostLossesAndAdoption) {
  const QuadraticProblem problem({1.0, 1.0, 1.0});
  EvolutionConfig cfg = small_config();
  cfg.max_generations = 2;
  ThreadPool pool(1);
  const EvolutionResult res = run_evolution(problem, cfg, pool);
  ASSERT_EQ(res.history.size(), 2u);
  const auto& first = res.history.front();
  EXPECT_EQ(first.generation, 1u);
  EXPECT_EQ(first.entry_losses.size(), cfg.population_size);
  EXPECT_EQ(first.trained_losses.size(), cfg.population_size);
  EXPECT_EQ(first.survivor_ids.size(), cfg.population_size);
  EXPECT_LE(first.children_adopted, cfg.population_size);
  // training on a convex objective helps every model
  for (std::size_t i = 0; i < cfg.population_size; ++i) {
    EXPECT_LT(first.trained_losses[i], first.entry_losses[i]);
  }
  // survivors can only improve on the parents as a set
  EXPECT_LE(first.survivor_total, first.parent_total);
}
