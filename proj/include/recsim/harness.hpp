#pragma once

#include "recsim/config.hpp"
#include "recsim/csv.hpp"
#include "recsim/dynamics.hpp"
#include "recsim/model.hpp"
#include "recsim/theory.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace recsim {

/// Environment variable consulted for the default output directory.
inline constexpr const char* kOutputDirEnv = "RECSIM_OUTPUT_DIR";

/// `dir` if non-empty, else $RECSIM_OUTPUT_DIR, else `fallback`.
std::filesystem::path resolve_output_dir(const std::string& dir, const std::string& fallback);

SimulationParams read_simulation_params(ConfigFile& cfg);
SimulationParams load_simulation_config(const std::filesystem::path& path);

/// Cartesian grid over (n_users, move_factor, p_produce, noise_sigma), with
/// noise varying fastest, replicated `replications` times per combination.
struct SweepSpec {
  std::vector<std::int64_t> n_users{1000, 2000, 5000};
  std::vector<double> move_factor{0.01, 0.02, 0.05};
  std::vector<double> p_produce{0.1, 0.2, 0.3};
  std::vector<double> noise_sigma{0.005, 0.01, 0.02};
  SimulationParams base;  // every other knob; master_seed is ignored
  std::int64_t replications = 5;
  std::uint64_t base_seed = 0;
  std::string output_dir;
  bool record_timing = false;  // wall_secs breaks byte-identical output

  void validate() const;
  std::int64_t combinations() const;
  std::int64_t total_runs() const { return combinations() * replications; }
  /// Parameters of run `run_index` = combination * replications + replication.
  SimulationParams params_for(std::int64_t run_index) const;
  std::uint64_t seed_for(std::int64_t combination, std::int64_t replication) const;
  /// "c<combination>_r<replication>", zero-padded.
  std::string run_id(std::int64_t run_index) const;
};

SweepSpec read_sweep_spec(ConfigFile& cfg);
SweepSpec load_sweep_config(const std::filesystem::path& path);

struct SweepOptions {
  int jobs = 1;
  bool write_metrics = true;
};

/// Executes every run on a pool of `jobs` workers and writes results.csv,
/// metrics_<run_id>.csv and manifest.json under spec.output_dir. Output
/// bytes do not depend on `jobs`. If a run throws, the manifest is written
/// with "complete": false and the exception is rethrown.
std::vector<RunRecord> run_sweep(const SweepSpec& spec, const SweepOptions& options = {});

/// Final-iteration row for one finished run.
RunRecord make_run_record(const SimulationParams& params, const MetricsRecord& final_metrics);

/// Aggregated view of one parameter combination.
struct SummaryRow {
  std::int64_t n_users = 0;
  std::int64_t n_iterations = 0;
  double move_factor = 0.0;
  double p_produce = 0.0;
  double noise_sigma = 0.0;
  std::int64_t runs = 0;
  int modal_clusters = 0;  // ties resolved to the smaller count
  double median_var = 0.0;
  std::optional<double> median_avg_dist;  // over runs where it is defined
  std::optional<double> median_min_dist;
};

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records);
void print_summary_table(std::ostream& out, const std::vector<SummaryRow>& rows);
void print_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

struct TheoryConfig {
  theory::SimplifiedParams params;
  theory::CheckOptions checks;
  std::int64_t seeds = 1;
};

TheoryConfig read_theory_config(ConfigFile& cfg);
TheoryConfig load_theory_config(const std::filesystem::path& path);

/// Runs the simplified model for seeds master_seed .. master_seed+seeds-1,
/// printing one verdict line per seed and a closing summary. Returns true iff
/// every check passed for every seed.
bool run_theory_report(const TheoryConfig& config, std::ostream& out);

}  // namespace recsim
