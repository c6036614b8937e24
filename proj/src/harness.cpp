#include "recsim/harness.hpp"

#include "recsim/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#ifndef RECSIM_VERSION
#define RECSIM_VERSION "unknown"
#endif

namespace recsim {

namespace fs = std::filesystem;

fs::path resolve_output_dir(const std::string& dir, const std::string& fallback) {
  if (!dir.empty()) return dir;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return fallback;
}

namespace {

// Fixed knobs shared by simulate and sweep configs. The four swept fields
// are handled by the callers because sweep configs accept lists for them.
void read_fixed_params(ConfigFile& cfg, SimulationParams& p) {
  cfg.get("n_iterations", p.n_iterations);
  cfg.get("dim", p.dim);
  cfg.get("decay_lambda", p.decay_lambda);
  cfg.get("creator_fraction", p.creator_fraction);
  cfg.get("role_churn_prob", p.role_churn_prob);
  cfg.get("frac_min", p.frac_min);
  cfg.get("frac_max", p.frac_max);
  cfg.get("prune_threshold", p.prune_threshold);
  cfg.get("dbscan_eps", p.dbscan_eps);
  cfg.get("dbscan_min_pts", p.dbscan_min_pts);
}

}  // namespace

SimulationParams read_simulation_params(ConfigFile& cfg) {
  SimulationParams p;
  cfg.get("n_users", p.n_users);
  cfg.get("move_factor", p.move_factor);
  cfg.get("p_produce", p.p_produce);
  cfg.get("noise_sigma", p.noise_sigma);
  read_fixed_params(cfg, p);
  cfg.get("master_seed", p.master_seed);
  cfg.finish();
  validate_config(cfg, [&] { p.validate(); });
  return p;
}

SimulationParams load_simulation_config(const fs::path& path) {
  auto cfg = ConfigFile::load(path);
  return read_simulation_params(cfg);
}

// --- sweep ------------------------------------------------------------------

void SweepSpec::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  need(!n_users.empty(), "n_users: list must not be empty");
  need(!move_factor.empty(), "move_factor: list must not be empty");
  need(!p_produce.empty(), "p_produce: list must not be empty");
  need(!noise_sigma.empty(), "noise_sigma: list must not be empty");
  need(replications >= 1, "replications: must be >= 1");
  for (std::int64_t c = 0; c < combinations(); ++c) params_for(c * replications).validate();
}

std::int64_t SweepSpec::combinations() const {
  return static_cast<std::int64_t>(n_users.size() * move_factor.size() * p_produce.size() *
                                   noise_sigma.size());
}

std::uint64_t SweepSpec::seed_for(std::int64_t combination, std::int64_t replication) const {
  return RngPolicy::derive_seed(base_seed, static_cast<std::uint64_t>(Purpose::kSweepSeed),
                                static_cast<std::uint64_t>(combination),
                                static_cast<std::uint64_t>(replication));
}

SimulationParams SweepSpec::params_for(std::int64_t run_index) const {
  if (run_index < 0 || run_index >= total_runs())
    throw std::out_of_range("SweepSpec::params_for: run index out of range");
  const std::int64_t combination = run_index / replications;
  const std::int64_t replication = run_index % replications;
  std::int64_t rest = combination;
  const auto pick = [&rest](const auto& list) {
    const auto n = static_cast<std::int64_t>(list.size());
    const auto v = list[static_cast<std::size_t>(rest % n)];
    rest /= n;
    return v;
  };
  SimulationParams p = base;
  p.noise_sigma = pick(noise_sigma);
  p.p_produce = pick(p_produce);
  p.move_factor = pick(move_factor);
  p.n_users = pick(n_users);
  p.master_seed = seed_for(combination, replication);
  return p;
}

std::string SweepSpec::run_id(std::int64_t run_index) const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "c%03lld_r%02lld", static_cast<long long>(run_index / replications),
                static_cast<long long>(run_index % replications));
  return buf;
}

SweepSpec read_sweep_spec(ConfigFile& cfg) {
  SweepSpec spec;
  cfg.get("n_users", spec.n_users);
  cfg.get("move_factor", spec.move_factor);
  cfg.get("p_produce", spec.p_produce);
  cfg.get("noise_sigma", spec.noise_sigma);
  read_fixed_params(cfg, spec.base);
  cfg.get("replications", spec.replications);
  cfg.get("base_seed", spec.base_seed);
  cfg.get("output_dir", spec.output_dir);
  cfg.get("record_timing", spec.record_timing);
  cfg.finish();
  validate_config(cfg, [&] { spec.validate(); });
  return spec;
}

SweepSpec load_sweep_config(const fs::path& path) {
  auto cfg = ConfigFile::load(path);
  return read_sweep_spec(cfg);
}

RunRecord make_run_record(const SimulationParams& params, const MetricsRecord& m) {
  RunRecord r;
  r.n_users = params.n_users;
  r.n_iterations = params.n_iterations;
  r.move_factor = params.move_factor;
  r.p_produce = params.p_produce;
  r.noise_sigma = params.noise_sigma;
  r.seed = params.master_seed;
  r.final_clusters = m.n_clusters;
  r.final_var = m.avg_cluster_variance;
  r.final_avg_dist = m.avg_inter_cluster_dist;
  r.final_min_dist = m.min_inter_cluster_dist;
  r.final_spread = m.pairwise_spread;
  return r;
}

namespace {

nlohmann::json params_json(const SimulationParams& p) {
  return {{"n_users", p.n_users},
          {"n_iterations", p.n_iterations},
          {"dim", p.dim},
          {"move_factor", p.move_factor},
          {"p_produce", p.p_produce},
          {"noise_sigma", p.noise_sigma},
          {"decay_lambda", p.decay_lambda},
          {"creator_fraction", p.creator_fraction},
          {"role_churn_prob", p.role_churn_prob},
          {"frac_min", p.frac_min},
          {"frac_max", p.frac_max},
          {"prune_threshold", p.prune_threshold},
          {"dbscan_eps", p.dbscan_eps},
          {"dbscan_min_pts", p.dbscan_min_pts},
          {"master_seed", p.master_seed}};
}

void write_manifest(const fs::path& path, const SweepSpec& spec,
                    const std::vector<std::optional<RunRecord>>& records) {
  nlohmann::json runs = nlohmann::json::array();
  std::int64_t completed = 0;
  for (std::int64_t i = 0; i < spec.total_runs(); ++i) {
    const bool done = records[static_cast<std::size_t>(i)].has_value();
    completed += done;
    runs.push_back({{"run_id", spec.run_id(i)},
                    {"combination", i / spec.replications},
                    {"replication", i % spec.replications},
                    {"seed", spec.seed_for(i / spec.replications, i % spec.replications)},
                    {"completed", done}});
  }
  nlohmann::json base = params_json(spec.base);
  base.erase("master_seed");
  const nlohmann::json manifest = {
      {"tool", "recsim"},
      {"version", RECSIM_VERSION},
      {"complete", completed == spec.total_runs()},
      {"total_runs", spec.total_runs()},
      {"completed_runs", completed},
      {"spec",
       {{"n_users", spec.n_users},
        {"move_factor", spec.move_factor},
        {"p_produce", spec.p_produce},
        {"noise_sigma", spec.noise_sigma},
        {"fixed", base},
        {"replications", spec.replications},
        {"base_seed", spec.base_seed},
        {"record_timing", spec.record_timing}}},
      {"runs", runs}};
  std::ofstream out(path);
  out << manifest.dump(2) << '\n';
}

}  // namespace

std::vector<RunRecord> run_sweep(const SweepSpec& spec, const SweepOptions& options) {
  spec.validate();
  const fs::path dir = resolve_output_dir(spec.output_dir, "results");
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path results_path = dir / "results.csv";
  {
    std::ofstream probe(results_path);
    if (!probe) throw std::runtime_error(dir.string() + ": output directory is not writable");
  }

  const std::int64_t total = spec.total_runs();
  std::vector<std::optional<RunRecord>> records(static_cast<std::size_t>(total));
  std::atomic<std::int64_t> next{0};
  std::atomic<bool> abort{false};
  std::mutex writer;
  std::exception_ptr failure;

  auto worker = [&] {
    while (!abort) {
      const std::int64_t i = next++;
      if (i >= total) break;
      try {
        const SimulationParams params = spec.params_for(i);
        const auto t0 = std::chrono::steady_clock::now();
        RunResult result = run(params, {1, options.write_metrics ? 1 : 0});
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const MetricsRecord last = result.history.empty()
                                       ? snapshot_metrics(result.final_state, params)
                                       : result.history.back();
        RunRecord rec = make_run_record(params, last);
        if (spec.record_timing) rec.wall_secs = secs;

        std::lock_guard lock(writer);
        if (options.write_metrics) {
          std::ofstream out(dir / ("metrics_" + spec.run_id(i) + ".csv"));
          write_metrics_csv(out, result.history);
          if (!out) throw std::runtime_error("failed writing metrics for run " + spec.run_id(i));
        }
        records[static_cast<std::size_t>(i)] = rec;
      } catch (...) {
        std::lock_guard lock(writer);
        if (!failure) failure = std::current_exception();
        abort = true;
      }
    }
  };

  const int jobs = std::max(1, options.jobs);
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<RunRecord> done;
  for (const auto& r : records)
    if (r) done.push_back(*r);
  {
    std::ofstream out(results_path);
    write_results_csv(out, done);
  }
  write_manifest(dir / "manifest.json", spec, records);
  if (failure) std::rethrow_exception(failure);
  return done;
}

// --- summarize ----------------------------------------------------------------

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::optional<double> median_present(const std::vector<std::optional<double>>& values) {
  std::vector<double> present;
  for (const auto& v : values)
    if (v) present.push_back(*v);
  if (present.empty()) return std::nullopt;
  return median_of(std::move(present));
}

}  // namespace

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records) {
  struct Group {
    SummaryRow row;
    std::vector<int> clusters;
    std::vector<double> var;
    std::vector<std::optional<double>> avg, min;
  };
  std::vector<Group> groups;
  for (const auto& r : records) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) {
      return g.row.n_users == r.n_users && g.row.n_iterations == r.n_iterations &&
             g.row.move_factor == r.move_factor && g.row.p_produce == r.p_produce &&
             g.row.noise_sigma == r.noise_sigma;
    });
    if (it == groups.end()) {
      Group g;
      g.row.n_users = r.n_users;
      g.row.n_iterations = r.n_iterations;
      g.row.move_factor = r.move_factor;
      g.row.p_produce = r.p_produce;
      g.row.noise_sigma = r.noise_sigma;
      groups.push_back(std::move(g));
      it = std::prev(groups.end());
    }
    it->clusters.push_back(r.final_clusters);
    it->var.push_back(r.final_var);
    it->avg.push_back(r.final_avg_dist);
    it->min.push_back(r.final_min_dist);
  }

  std::vector<SummaryRow> rows;
  for (auto& g : groups) {
    std::map<int, int> counts;
    for (int c : g.clusters) ++counts[c];
    int best = 0;
    for (const auto& [value, count] : counts)
      if (count > best) {  // ascending keys: ties keep the smaller count
        best = count;
        g.row.modal_clusters = value;
      }
    g.row.runs = static_cast<std::int64_t>(g.clusters.size());
    g.row.median_var = median_of(g.var);
    g.row.median_avg_dist = median_present(g.avg);
    g.row.median_min_dist = median_present(g.min);
    rows.push_back(g.row);
  }
  return rows;
}

void print_summary_table(std::ostream& out, const std::vector<SummaryRow>& rows) {
  char line[256];
  std::snprintf(line, sizeof line, "%6s %5s %7s %9s %11s %5s %8s %9s %9s %9s\n", "N", "T", "alpha",
                "p_produce", "sigma_noise", "runs", "clusters", "var", "avg_dist", "min_dist");
  out << line;
  for (const auto& r : rows) {
    const auto opt = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string("-"); };
    std::snprintf(line, sizeof line, "%6lld %5lld %7s %9s %11s %5lld %8d %9s %9s %9s\n",
                  static_cast<long long>(r.n_users), static_cast<long long>(r.n_iterations),
                  format_real(r.move_factor).c_str(), format_real(r.p_produce).c_str(),
                  format_real(r.noise_sigma).c_str(), static_cast<long long>(r.runs),
                  r.modal_clusters, format_real(r.median_var).c_str(), opt(r.median_avg_dist).c_str(),
                  opt(r.median_min_dist).c_str());
    out << line;
  }
}

void print_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "n_users,n_iterations,move_factor,p_produce,noise_sigma,runs,modal_clusters,median_var,"
         "median_avg_dist,median_min_dist\n";
  for (const auto& r : rows)
    out << r.n_users << ',' << r.n_iterations << ',' << format_real(r.move_factor) << ','
        << format_real(r.p_produce) << ',' << format_real(r.noise_sigma) << ',' << r.runs << ','
        << r.modal_clusters << ',' << format_real(r.median_var) << ','
        << format_real(r.median_avg_dist) << ',' << format_real(r.median_min_dist) << '\n';
}

// --- theory -------------------------------------------------------------------

TheoryConfig read_theory_config(ConfigFile& cfg) {
  TheoryConfig tc;
  auto& p = tc.params;
  cfg.get("creator_positions", p.creator_positions);
  cfg.get("n_users", p.n_users);
  cfg.get("rho", p.rho);
  cfg.get("alpha", p.alpha);
  cfg.get("n_iterations", p.n_iterations);
  cfg.get("noise_sigma", p.noise_sigma);
  cfg.get("decay_lambda", p.decay_lambda);
  cfg.get("prune_threshold", p.prune_threshold);
  cfg.get("init_mu", p.init_mu);
  cfg.get("init_sigma", p.init_sigma);
  cfg.get("master_seed", p.master_seed);
  cfg.get("cluster_tolerance", tc.checks.cluster_tolerance);
  cfg.get("centroid_tolerance", tc.checks.centroid_tolerance);
  cfg.get("contraction_window", tc.checks.contraction_window);
  cfg.get("contraction_ratio", tc.checks.contraction_ratio);
  cfg.get("seeds", tc.seeds);
  cfg.finish();
  validate_config(cfg, [&] {
    p.validate();
    if (!(tc.checks.cluster_tolerance > 0.0))
      throw std::invalid_argument("cluster_tolerance: must be > 0");
    if (tc.checks.contraction_window < 1)
      throw std::invalid_argument("contraction_window: must be >= 1");
    if (!(tc.checks.contraction_ratio > 0.0))
      throw std::invalid_argument("contraction_ratio: must be > 0");
    if (tc.seeds < 1) throw std::invalid_argument("seeds: must be >= 1");
  });
  return tc;
}

TheoryConfig load_theory_config(const fs::path& path) {
  auto cfg = ConfigFile::load(path);
  return read_theory_config(cfg);
}

bool run_theory_report(const TheoryConfig& config, std::ostream& out) {
  std::int64_t theorem_fail = 0, contraction_fail = 0, bounded_fail = 0, passed = 0;
  const auto verdict = [](bool ok) { return ok ? "PASS" : "FAIL"; };
  for (std::int64_t s = 0; s < config.seeds; ++s) {
    theory::SimplifiedParams p = config.params;
    p.master_seed = config.params.master_seed + static_cast<std::uint64_t>(s);
    const theory::CheckReport r = theory::run_checks(p, config.checks);
    theorem_fail += !r.theorem.passed;
    contraction_fail += !r.contraction;
    bounded_fail += !r.boundedness.value_or(true);
    passed += r.all_passed();

    out << "seed " << p.master_seed << ": theorem " << verdict(r.theorem.passed)
        << " (clusters=" << r.theorem.n_clusters << ", bound=" << p.creator_positions.size()
        << (r.theorem.centroids_near_creators ? "" : ", centroid off creator") << ")"
        << " | contraction " << verdict(r.contraction) << " (ratio=" << format_real(r.spread_ratio)
        << ", windowed=" << (r.windowed.passed ? "ok" : "violated at t=" + std::to_string(*r.windowed.first_violation))
        << ") | boundedness "
        << (r.boundedness ? verdict(*r.boundedness) : "SKIPPED (noise)") << '\n';
  }
  const bool ok = passed == config.seeds;
  if (ok) {
    out << "theory: all checks passed for " << config.seeds << " seed(s)\n";
  } else {
    out << "theory: FAILED";
    if (theorem_fail) out << " theorem(" << theorem_fail << " seeds)";
    if (contraction_fail) out << " contraction(" << contraction_fail << " seeds)";
    if (bounded_fail) out << " boundedness(" << bounded_fail << " seeds)";
    out << '\n';
  }
  return ok;
}

}  // namespace recsim
