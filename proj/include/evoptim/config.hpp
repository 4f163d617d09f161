#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "evoptim/dataset.hpp"
#include "evoptim/error.hpp"
#include "evoptim/evolution.hpp"
#include "evoptim/mlp.hpp"
#include "evoptim/optimizers.hpp"

namespace evoptim {

/// Where an experiment's data comes from.
struct DataSourceConfig {
  enum class Format { Csv, MnistIdx, Synthetic };
  Format format = Format::Synthetic;
  std::string schema = "yeast";      // csv only
  std::string path;                  // csv only
  std::string images_path;           // mnist-idx only
  std::string labels_path;           // mnist-idx only
  std::string test_images_path;      // optional; absent = split the train pair
  std::string test_labels_path;
  std::size_t subsample = 0;         // 0 = keep everything (seeded, applied to the train side)
  double train_fraction = 0.8;
  std::size_t per_class = 0;         // nonzero selects per-class splitting
  std::uint64_t split_seed = 1;
  bool standardize = true;
  // synthetic only
  std::size_t synthetic_rows = 1500;
  std::size_t synthetic_cols = 8;
  int synthetic_classes = 10;
  double synthetic_separation = 2.0;
  std::uint64_t synthetic_seed = 7;
};

struct ObjectiveConfig {
  enum class Kind { Dataset, Benchmark };
  Kind kind = Kind::Dataset;
  std::string benchmark = "rastrigin2d";
  DataSourceConfig data;
  std::vector<std::size_t> mlp_layers;  // empty = per-schema default
  Activation activation = Activation::Relu;
  OutputKind output = OutputKind::SoftmaxCrossEntropy;
  InitScheme init = InitScheme::FanInScaled;
};

/// A full experiment: the objective, the algorithm, its knobs, the seeds to
/// sweep, and where output lands. Every field has a default, so an empty
/// JSON object is a valid config.
struct ExperimentConfig {
  ObjectiveConfig objective;
  std::string algorithm = "gadam";  // gadam | adam | sgd | sgdm | adagrad |
                                    // rmsprop | adadelta | multi-start-adam
  EvolutionConfig evolution;
  OptimizerSpec optimizer = OptimizerSpec::defaults(OptimizerKind::Adam);
  bool optimizer_eta_set = false;   // whether the config pinned eta explicitly
  std::size_t batch_size = 128;
  std::size_t validation_batch_size = 256;
  std::size_t train_steps = 1000;   // total steps for single-model algorithms
  std::size_t runs = 10;            // population of multi-start-adam
  unsigned threads = 0;             // 0 = resolve via env/hardware
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::size_t log_every = 10;
  std::string out_dir = "out";
};

namespace detail {

inline OptimizerKind optimizer_kind_from_name(const std::string& name) {
  if (name == "adam" || name == "multi-start-adam" || name == "gadam") {
    return OptimizerKind::Adam;
  }
  if (name == "sgd") return OptimizerKind::Sgd;
  if (name == "sgdm") return OptimizerKind::Sgdm;
  if (name == "adagrad") return OptimizerKind::AdaGrad;
  if (name == "rmsprop") return OptimizerKind::RmsProp;
  if (name == "adadelta") return OptimizerKind::AdaDelta;
  throw ConfigError("unknown algorithm: " + name);
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

}  // namespace detail

inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  using detail::get_or;

  if (j.contains("objective")) {
    const auto& jo = j.at("objective");
    const std::string kind = get_or<std::string>(jo, "kind", "dataset");
    if (kind == "benchmark") {
      cfg.objective.kind = ObjectiveConfig::Kind::Benchmark;
      cfg.objective.benchmark = get_or<std::string>(jo, "benchmark", "rastrigin2d");
      benchmark_by_name(cfg.objective.benchmark);  // validate early
    } else if (kind == "dataset") {
      cfg.objective.kind = ObjectiveConfig::Kind::Dataset;
    } else {
      throw ConfigError("objective.kind must be 'dataset' or 'benchmark'");
    }
    if (jo.contains("data")) {
      const auto& jd = jo.at("data");
      auto& d = cfg.objective.data;
      const std::string format = get_or<std::string>(jd, "format", "synthetic");
      if (format == "csv") d.format = DataSourceConfig::Format::Csv;
      else if (format == "mnist-idx") d.format = DataSourceConfig::Format::MnistIdx;
      else if (format == "synthetic") d.format = DataSourceConfig::Format::Synthetic;
      else throw ConfigError("data.format must be csv, mnist-idx or synthetic");
      d.schema = get_or<std::string>(jd, "schema", d.schema);
      d.path = get_or<std::string>(jd, "path", d.path);
      d.images_path = get_or<std::string>(jd, "images", d.images_path);
      d.labels_path = get_or<std::string>(jd, "labels", d.labels_path);
      d.test_images_path = get_or<std::string>(jd, "test_images", d.test_images_path);
      d.test_labels_path = get_or<std::string>(jd, "test_labels", d.test_labels_path);
      // full MNIST is larger than a desk run needs; default to a 6k subsample
      if (d.format == DataSourceConfig::Format::MnistIdx && !jd.contains("subsample")) {
        d.subsample = 6000;
      }
      d.subsample = get_or<std::size_t>(jd, "subsample", d.subsample);
      d.train_fraction = get_or<double>(jd, "train_fraction", d.train_fraction);
      d.per_class = get_or<std::size_t>(jd, "per_class", d.per_class);
      d.split_seed = get_or<std::uint64_t>(jd, "split_seed", d.split_seed);
      d.standardize = get_or<bool>(jd, "standardize", d.standardize);
      d.synthetic_rows = get_or<std::size_t>(jd, "rows", d.synthetic_rows);
      d.synthetic_cols = get_or<std::size_t>(jd, "cols", d.synthetic_cols);
      d.synthetic_classes = get_or<int>(jd, "classes", d.synthetic_classes);
      d.synthetic_separation = get_or<double>(jd, "separation", d.synthetic_separation);
      d.synthetic_seed = get_or<std::uint64_t>(jd, "data_seed", d.synthetic_seed);
    }
    if (jo.contains("mlp")) {
      const auto& jm = jo.at("mlp");
      cfg.objective.mlp_layers =
          get_or<std::vector<std::size_t>>(jm, "layers", cfg.objective.mlp_layers);
      const std::string act = get_or<std::string>(jm, "activation", "relu");
      if (act == "relu") cfg.objective.activation = Activation::Relu;
      else if (act == "tanh") cfg.objective.activation = Activation::Tanh;
      else throw ConfigError("mlp.activation must be relu or tanh");
      const std::string out = get_or<std::string>(jm, "output", "softmax");
      if (out == "softmax") cfg.objective.output = OutputKind::SoftmaxCrossEntropy;
      else if (out == "mean-square") cfg.objective.output = OutputKind::MeanSquare;
      else throw ConfigError("mlp.output must be softmax or mean-square");
      const std::string init = get_or<std::string>(jm, "init", "fan-in");
      if (init == "fan-in") cfg.objective.init = InitScheme::FanInScaled;
      else if (init == "standard-normal") cfg.objective.init = InitScheme::StandardNormal;
      else throw ConfigError("mlp.init must be fan-in or standard-normal");
    }
  }

  cfg.algorithm = detail::get_or<std::string>(j, "algorithm", cfg.algorithm);
  const OptimizerKind kind = detail::optimizer_kind_from_name(cfg.algorithm);
  cfg.optimizer = OptimizerSpec::defaults(kind);

  if (j.contains("optimizer")) {
    const auto& jop = j.at("optimizer");
    if (jop.contains("eta")) {
      cfg.optimizer.eta = jop.at("eta").get<double>();
      cfg.optimizer_eta_set = true;
    }
    cfg.optimizer.beta1 = get_or<double>(jop, "beta1", cfg.optimizer.beta1);
    cfg.optimizer.beta2 = get_or<double>(jop, "beta2", cfg.optimizer.beta2);
    cfg.optimizer.eps = get_or<double>(jop, "eps", cfg.optimizer.eps);
    cfg.optimizer.beta = get_or<double>(jop, "beta", cfg.optimizer.beta);
    cfg.optimizer.rho = get_or<double>(jop, "rho", cfg.optimizer.rho);
    cfg.optimizer.adadelta_eps =
        get_or<double>(jop, "adadelta_eps", cfg.optimizer.adadelta_eps);
  }

  cfg.batch_size = get_or<std::size_t>(j, "batch_size", cfg.batch_size);
  cfg.validation_batch_size =
      get_or<std::size_t>(j, "validation_batch_size", cfg.validation_batch_size);
  cfg.train_steps = get_or<std::size_t>(j, "train_steps", cfg.train_steps);
  cfg.runs = get_or<std::size_t>(j, "runs", cfg.runs);
  cfg.threads = get_or<unsigned>(j, "threads", cfg.threads);
  cfg.seeds = get_or<std::vector<std::uint64_t>>(j, "seeds", cfg.seeds);
  cfg.log_every = get_or<std::size_t>(j, "log_every", cfg.log_every);
  cfg.out_dir = get_or<std::string>(j, "out_dir", cfg.out_dir);

  if (j.contains("evolution")) {
    const auto& je = j.at("evolution");
    auto& e = cfg.evolution;
    e.population_size = get_or<std::size_t>(je, "population", e.population_size);
    e.max_generations = get_or<std::size_t>(je, "max_generations", e.max_generations);
    e.base_mutation_rate = get_or<double>(je, "base_mutation_rate", e.base_mutation_rate);
    e.stop_threshold = get_or<double>(je, "stop_threshold", e.stop_threshold);
    e.train_steps = get_or<std::size_t>(je, "train_steps", e.train_steps);
    const std::string dist = get_or<std::string>(je, "mutation_dist", "uniform01");
    if (dist == "uniform01") e.mutation_dist = MutationDist::Uniform01;
    else if (dist == "normal") e.mutation_dist = MutationDist::StandardNormal;
    else throw ConfigError("evolution.mutation_dist must be uniform01 or normal");
  }
  cfg.evolution.batch_size = cfg.batch_size;
  cfg.evolution.validation_batch_size = cfg.validation_batch_size;
  cfg.evolution.adam =
      AdamConfig{cfg.optimizer.eta, cfg.optimizer.beta1, cfg.optimizer.beta2, cfg.optimizer.eps};

  if (cfg.seeds.empty()) throw ConfigError("config: seeds must be non-empty");
  if (cfg.runs < 1) throw ConfigError("config: runs must be >= 1");
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
  return experiment_config_from_json(j);
}

/// Worker count resolution: explicit CLI value, else the config file, else
/// the EVOPTIM_THREADS environment variable, else the hardware count.
inline unsigned resolve_threads(unsigned cli_value, unsigned config_value) {
  if (cli_value > 0) return cli_value;
  if (config_value > 0) return config_value;
  if (const char* env = std::getenv("EVOPTIM_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

}  // namespace evoptim
