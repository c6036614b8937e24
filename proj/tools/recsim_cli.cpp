// Command-line front end: simulate, sweep, summarize, theory.

#include "recsim/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace fs = std::filesystem;

namespace {

int simulate(const std::string& config, std::optional<std::uint64_t> seed, const std::string& out,
             int threads) {
  recsim::SimulationParams params =
      config.empty() ? recsim::SimulationParams{} : recsim::load_simulation_config(config);
  if (seed) params.master_seed = *seed;
  const fs::path dir = recsim::resolve_output_dir(out, "simulate_out");
  fs::create_directories(dir);

  recsim::RunResult result = recsim::run(params, {threads, 1});
  const recsim::MetricsRecord last = result.history.empty()
                                         ? recsim::snapshot_metrics(result.final_state, params)
                                         : result.history.back();
  {
    std::ofstream metrics(dir / "metrics.csv");
    recsim::write_metrics_csv(metrics, result.history);
    std::ofstream results(dir / "results.csv");
    recsim::write_results_csv(results, {recsim::make_run_record(params, last)});
    if (!metrics || !results) throw std::runtime_error(dir.string() + ": cannot write output");
  }
  std::cout << "seed " << params.master_seed << ": " << last.n_clusters << " clusters, var "
            << recsim::format_real(last.avg_cluster_variance) << ", avg dist "
            << (last.avg_inter_cluster_dist ? recsim::format_real(*last.avg_inter_cluster_dist) : "-")
            << ", min dist "
            << (last.min_inter_cluster_dist ? recsim::format_real(*last.min_inter_cluster_dist) : "-")
            << ", pool " << last.pool_size << "\nwrote " << (dir / "metrics.csv").string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Agent-based simulator of similarity-based recommendation dynamics"};
  app.require_subcommand(1);

  std::string sim_config, sim_out;
  std::optional<std::uint64_t> sim_seed;
  int sim_threads = 1;
  auto* sim = app.add_subcommand("simulate", "Run one simulation and write per-iteration metrics");
  sim->add_option("--config", sim_config, "key=value config file (defaults when omitted)");
  sim->add_option("--seed", sim_seed, "Override master_seed");
  sim->add_option("--out", sim_out, "Output directory (default $RECSIM_OUTPUT_DIR or simulate_out)");
  sim->add_option("--threads", sim_threads, "Worker threads for user updates")->check(CLI::PositiveNumber);

  std::string sweep_config, sweep_out;
  std::optional<std::int64_t> sweep_reps;
  int sweep_jobs = 1;
  auto* sweep = app.add_subcommand("sweep", "Run a parameter grid with replications");
  sweep->add_option("--config", sweep_config, "key=value sweep config")->required();
  sweep->add_option("--replications", sweep_reps, "Override replications")->check(CLI::PositiveNumber);
  sweep->add_option("--jobs", sweep_jobs, "Concurrent runs")->check(CLI::PositiveNumber);
  sweep->add_option("--out", sweep_out, "Output directory (overrides output_dir)");

  std::string results_path;
  bool summary_csv = false;
  auto* summarize = app.add_subcommand("summarize", "Aggregate results.csv per parameter combination");
  summarize->add_option("results", results_path, "results.csv")->required();
  summarize->add_flag("--csv", summary_csv, "Machine-readable output");

  std::string theory_config;
  std::optional<std::int64_t> theory_seeds;
  auto* theory = app.add_subcommand("theory", "Check the one-dimensional cluster bound and spread contraction");
  theory->add_option("--config", theory_config, "key=value theory config (defaults when omitted)");
  theory->add_option("--seeds", theory_seeds, "Number of seeds")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return simulate(sim_config, sim_seed, sim_out, sim_threads);

    if (*sweep) {
      recsim::SweepSpec spec = recsim::load_sweep_config(sweep_config);
      if (sweep_reps) spec.replications = *sweep_reps;
      if (!sweep_out.empty()) spec.output_dir = sweep_out;
      spec.output_dir = recsim::resolve_output_dir(spec.output_dir, "results").string();
      std::cerr << "sweep: " << spec.combinations() << " combinations x " << spec.replications
                << " replications = " << spec.total_runs() << " runs\n";
      const auto records = recsim::run_sweep(spec, {sweep_jobs, true});
      std::cerr << "wrote " << records.size() << " rows to "
                << (fs::path(spec.output_dir) / "results.csv").string() << '\n';
      return 0;
    }

    if (*summarize) {
      std::ifstream in(results_path);
      if (!in) throw std::runtime_error(results_path + ": cannot open");
      const auto rows = recsim::summarize(recsim::read_results_csv(in, results_path));
      if (summary_csv)
        recsim::print_summary_csv(std::cout, rows);
      else
        recsim::print_summary_table(std::cout, rows);
      return 0;
    }

    if (*theory) {
      recsim::TheoryConfig tc;
      if (!theory_config.empty()) tc = recsim::load_theory_config(theory_config);
      if (theory_seeds) tc.seeds = *theory_seeds;
      return recsim::run_theory_report(tc, std::cout) ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
