#include "recsim/csv.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace recsim {

std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

std::string format_real(const std::optional<double>& value) {
  return value ? format_real(*value) : std::string{};
}

void write_results_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << kResultsHeader << '\n';
  for (const auto& r : records) {
    out << r.n_users << ',' << r.n_iterations << ',' << format_real(r.move_factor) << ','
        << format_real(r.p_produce) << ',' << format_real(r.noise_sigma) << ',' << r.seed << ','
        << r.final_clusters << ',' << format_real(r.final_var) << ','
        << format_real(r.final_avg_dist) << ',' << format_real(r.final_min_dist) << ','
        << format_real(r.final_spread) << ',' << format_real(r.wall_secs) << '\n';
  }
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRecord>& history) {
  out << kMetricsHeader << '\n';
  for (const auto& m : history) {
    out << m.iteration << ',' << m.n_clusters << ',' << format_real(m.avg_cluster_variance) << ','
        << format_real(m.avg_inter_cluster_dist) << ',' << format_real(m.min_inter_cluster_dist)
        << ',' << format_real(m.pairwise_spread) << ',' << m.pool_size << '\n';
  }
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

template <typename T>
T parse_field(const std::string& s, const std::string& where) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw std::runtime_error(where + ": cannot parse field '" + s + "'");
  return value;
}

std::optional<double> parse_optional(const std::string& s, const std::string& where) {
  if (s.empty()) return std::nullopt;
  return parse_field<double>(s, where);
}

}  // namespace

std::vector<RunRecord> read_results_csv(std::istream& in, const std::string& source) {
  std::vector<RunRecord> records;
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) return records;
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultsHeader) throw std::runtime_error(source + ":1: unexpected header");
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    const auto f = split_fields(line);
    if (f.size() != 12) throw std::runtime_error(where + ": expected 12 fields");
    RunRecord r;
    r.n_users = parse_field<std::int64_t>(f[0], where);
    r.n_iterations = parse_field<std::int64_t>(f[1], where);
    r.move_factor = parse_field<double>(f[2], where);
    r.p_produce = parse_field<double>(f[3], where);
    r.noise_sigma = parse_field<double>(f[4], where);
    r.seed = parse_field<std::uint64_t>(f[5], where);
    r.final_clusters = parse_field<int>(f[6], where);
    r.final_var = parse_field<double>(f[7], where);
    r.final_avg_dist = parse_optional(f[8], where);
    r.final_min_dist = parse_optional(f[9], where);
    r.final_spread = parse_field<double>(f[10], where);
    r.wall_secs = parse_optional(f[11], where);
    records.push_back(r);
  }
  return records;
}

}  // namespace recsim
