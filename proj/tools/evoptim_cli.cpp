#include <cstdint>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evoptim/evoptim.hpp"

namespace {

std::vector<unsigned> parse_thread_list(const std::string& text) {
  std::vector<unsigned> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const unsigned lo = static_cast<unsigned>(std::stoul(text.substr(0, dots)));
    const unsigned hi = static_cast<unsigned>(std::stoul(text.substr(dots + 2)));
    for (unsigned t = lo; t <= hi; ++t) out.push_back(t);
    return out;
  }
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto comma = text.find(',', pos);
    const std::string tok = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
    if (!tok.empty()) out.push_back(static_cast<unsigned>(std::stoul(tok)));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

int cmd_run(const std::string& config_path, unsigned threads, std::int64_t seed,
            const std::string& out_dir) {
  evoptim::ExperimentConfig cfg = evoptim::load_experiment_config(config_path);
  if (seed >= 0) cfg.seeds = {static_cast<std::uint64_t>(seed)};
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  const unsigned width = evoptim::resolve_threads(threads, cfg.threads);
  evoptim::ThreadPool pool(width);
  const evoptim::ExperimentResult result = evoptim::run_experiment(cfg, pool);

  std::cout << "algorithm: " << cfg.algorithm << "  threads: " << width << "\n";
  for (const auto& s : result.seeds) {
    std::cout << "  seed " << s.seed << ": val loss " << s.val_loss;
    if (!std::isnan(s.test_accuracy)) {
      std::cout << ", test accuracy " << 100.0 * s.test_accuracy << "%";
    }
    std::cout << "\n";
  }
  std::cout << "wrote " << cfg.out_dir << "/metrics.csv\n";
  return 0;
}

int cmd_compare(const std::vector<std::string>& config_paths, unsigned threads,
                const std::string& out_dir) {
  std::vector<evoptim::ExperimentConfig> cfgs;
  for (const auto& p : config_paths) cfgs.push_back(evoptim::load_experiment_config(p));
  const std::string dir = out_dir.empty() ? cfgs.front().out_dir : out_dir;
  const unsigned width = evoptim::resolve_threads(threads, cfgs.front().threads);
  evoptim::ThreadPool pool(width);
  const auto rows = evoptim::compare_algorithms(cfgs, pool);

  std::filesystem::create_directories(dir);
  evoptim::write_compare_csv(dir + "/summary.csv", rows);
  std::cout << std::left << std::setw(18) << "algorithm" << std::setw(22)
            << "test accuracy" << "test loss\n";
  for (const auto& r : rows) {
    std::ostringstream acc, loss;
    if (!std::isnan(r.mean_test_accuracy)) {
      acc << 100.0 * r.mean_test_accuracy << " +- " << 100.0 * r.std_test_accuracy;
      loss << r.mean_test_loss << " +- " << r.std_test_loss;
    } else {
      acc << "n/a";
      loss << r.mean_val_loss << " (objective value)";
    }
    std::cout << std::left << std::setw(18) << r.algorithm << std::setw(22) << acc.str()
              << loss.str() << "\n";
  }
  std::cout << "wrote " << dir << "/summary.csv\n";
  return 0;
}

int cmd_bench_parallel(const std::string& config_path, const std::string& thread_spec,
                       const std::string& out_dir) {
  evoptim::ExperimentConfig cfg = evoptim::load_experiment_config(config_path);
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  const std::vector<unsigned> counts = parse_thread_list(thread_spec);
  const auto rows = evoptim::measure_parallel_efficiency(cfg, counts);

  std::filesystem::create_directories(cfg.out_dir);
  evoptim::write_timing_csv(cfg.out_dir + "/timing.csv", rows);
  std::cout << std::left << std::setw(10) << "threads" << std::setw(14) << "total ms"
            << std::setw(18) << "per-generation ms" << "identical\n";
  for (const auto& r : rows) {
    std::cout << std::left << std::setw(10) << r.threads << std::setw(14) << r.total_ms
              << std::setw(18) << r.mean_generation_ms
              << (r.identical_result ? "yes" : "NO") << "\n";
  }
  std::cout << "wrote " << cfg.out_dir << "/timing.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"evoptim: population-based and gradient optimizer experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir, thread_spec = "1..4";
  std::vector<std::string> config_paths;
  unsigned threads = 0;
  std::int64_t seed = -1;

  auto* run = app.add_subcommand("run", "run one experiment config");
  run->add_option("--config", config_path, "JSON config file")->required();
  run->add_option("--threads", threads, "worker threads (0 = auto)");
  run->add_option("--seed", seed, "override the config's seed list with one seed");
  run->add_option("--out", out_dir, "output directory");

  auto* compare = app.add_subcommand("compare", "run several configs on one objective");
  compare->add_option("--configs", config_paths, "JSON config files")->required()->expected(-1);
  compare->add_option("--threads", threads, "worker threads (0 = auto)");
  compare->add_option("--out", out_dir, "output directory");

  auto* bench = app.add_subcommand("bench-parallel", "time the learner across worker counts");
  bench->add_option("--config", config_path, "JSON config file (gadam)")->required();
  bench->add_option("--threads", thread_spec, "counts, e.g. 1..10 or 1,2,4");
  bench->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(run)) return cmd_run(config_path, threads, seed, out_dir);
    if (app.got_subcommand(compare)) return cmd_compare(config_paths, threads, out_dir);
    if (app.got_subcommand(bench)) return cmd_bench_parallel(config_path, thread_spec, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
