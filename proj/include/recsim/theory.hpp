#pragma once

#include "recsim/types.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace recsim::theory {

/// One-dimensional model with M fixed creators that each publish one item per
/// iteration, a fixed neighbourhood fraction rho and optional noise.
struct SimplifiedParams {
  std::vector<double> creator_positions{-1.0, 1.0};  // strictly increasing
  std::int64_t n_users = 200;
  double rho = 0.3;  // strictly inside (0.05, 0.5)
  double alpha = 0.05;
  std::int64_t n_iterations = 300;
  double noise_sigma = 0.0;
  double decay_lambda = 0.5;
  double prune_threshold = 0.005;
  double init_mu = 0.0;
  double init_sigma = 1.0;
  std::uint64_t master_seed = 0;

  void validate() const;
};

struct SimplifiedRun {
  // n_users x (n_iterations + 1); column t holds the positions after t steps.
  Eigen::MatrixXd trajectory;
  // Pairwise spread after each step, entry 0 being the initial spread.
  std::vector<double> spread_history;

  Eigen::VectorXd initial_positions() const { return trajectory.col(0); }
  Eigen::VectorXd final_positions() const { return trajectory.rightCols(1); }
};

/// ceil(rho * n), at least 1 and at most n.
Index fixed_fraction_k(Index n_items, double rho);

SimplifiedRun run_simplified(const SimplifiedParams& params);

/// Sum of |x_i - x_j| over unordered pairs, in O(n log n).
double spread_1d(std::span<const double> positions);

struct TheoremVerdict {
  bool passed = false;
  int n_clusters = 0;
  bool count_within_bound = false;
  bool centroids_near_creators = false;
  std::vector<double> centroids;
};

/// Gap clustering: sorted positions split wherever consecutive values differ
/// by more than `gap`. Returns the centroid of each group in ascending order.
std::vector<double> gap_cluster_centroids(std::span<const double> positions, double gap);

/// At most M clusters (gap clustering with `cluster_tolerance`), each centroid
/// within `centroid_tolerance` of some creator. A negative centroid tolerance
/// means "same as cluster_tolerance".
TheoremVerdict check_theorem(std::span<const double> final_positions,
                             std::span<const double> creator_positions, double cluster_tolerance,
                             double centroid_tolerance = -1.0);

struct ContractionVerdict {
  bool passed = false;
  std::optional<Index> first_violation;
};

/// Windowed non-increase: for every t, mean(spread[t, t+w)) >= mean(spread[t+w, t+2w)),
/// up to floating-point rounding.
ContractionVerdict check_spread_contraction(std::span<const double> spread_history, Index window);

/// Every recorded position stays inside the hull of the initial users and the
/// creators, widened only by machine-epsilon rounding.
bool check_boundedness(const Eigen::MatrixXd& trajectory, std::span<const double> creator_positions,
                       std::span<const double> initial_positions);

struct CheckOptions {
  double cluster_tolerance = 0.1;
  double centroid_tolerance = -1.0;
  Index contraction_window = 10;
  // Final spread must fall below this multiple of the initial spread.
  double contraction_ratio = 1.0;
};

struct CheckReport {
  TheoremVerdict theorem;
  ContractionVerdict windowed;
  double spread_ratio = 0.0;  // final / initial
  bool contraction = false;   // windowed && spread_ratio < contraction_ratio
  std::optional<bool> boundedness;  // nullopt when noise voids the bound
  bool all_passed() const { return theorem.passed && contraction && boundedness.value_or(true); }
};

CheckReport run_checks(const SimplifiedParams& params, const CheckOptions& options = {});

}  // namespace recsim::theory
