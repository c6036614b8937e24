#pragma once

#include "recsim/metrics.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace recsim {

inline constexpr std::string_view kResultsHeader =
    "n_users,n_iterations,move_factor,p_produce,noise_sigma,seed,final_clusters,final_var,"
    "final_avg_dist,final_min_dist,final_spread,wall_secs";

inline constexpr std::string_view kMetricsHeader =
    "iteration,n_clusters,avg_variance,avg_inter_dist,min_inter_dist,spread,pool_size";

/// Six significant digits, "C" locale, no trailing zeros ("%.6g").
std::string format_real(double value);
std::string format_real(const std::optional<double>& value);  // empty when absent

/// One row of results.csv.
struct RunRecord {
  std::int64_t n_users = 0;
  std::int64_t n_iterations = 0;
  double move_factor = 0.0;
  double p_produce = 0.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  int final_clusters = 0;
  double final_var = 0.0;
  std::optional<double> final_avg_dist;
  std::optional<double> final_min_dist;
  double final_spread = 0.0;
  std::optional<double> wall_secs;
};

void write_results_csv(std::ostream& out, const std::vector<RunRecord>& records);
void write_metrics_csv(std::ostream& out, const std::vector<MetricsRecord>& history);

/// Parses results.csv. Throws std::runtime_error naming the bad line.
std::vector<RunRecord> read_results_csv(std::istream& in, const std::string& source = "<results>");

}  // namespace recsim
