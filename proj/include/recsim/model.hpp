#pragma once

#include "recsim/rng.hpp"
#include "recsim/types.hpp"

#include <cstdint>
#include <vector>

namespace recsim {

/// Every knob of the full model. Defaults are the baseline experimental
/// settings (N=1000, T=500, planar latent space, lambda=0.5, 10% creators).
struct SimulationParams {
  std::int64_t n_users = 1000;
  std::int64_t n_iterations = 500;
  int dim = 2;
  double move_factor = 0.01;
  double p_produce = 0.2;
  double noise_sigma = 0.005;
  double decay_lambda = 0.5;
  double creator_fraction = 0.1;
  double role_churn_prob = 0.01;
  double frac_min = 0.05;
  double frac_max = 0.5;
  // Just below e^-5, so items live for exactly ten iterations at lambda=0.5.
  double prune_threshold = 0.005;
  double dbscan_eps = 0.2;
  int dbscan_min_pts = 10;
  std::uint64_t master_seed = 0;

  /// Throws std::invalid_argument naming the first offending field.
  void validate() const;

  /// ceil(creator_fraction * n_users), the conserved creator count.
  std::int64_t creator_count() const;
};

struct UserState {
  UserId id = 0;
  VectorXd position;
  bool is_creator = false;
};

struct ContentItem {
  ContentId id = 0;
  UserId creator_id = 0;
  VectorXd position;
  Iteration birth_iteration = 0;
};

/// Live content, stored structure-of-arrays so the nearest-neighbour scan
/// can walk a contiguous d x n coordinate block.
class ContentPool {
 public:
  explicit ContentPool(int dim = 2) : dim_(dim) {}

  int dim() const { return dim_; }
  Index size() const { return static_cast<Index>(ids_.size()); }
  bool empty() const { return ids_.empty(); }

  Eigen::Map<const PointsXd> positions() const {
    return {coords_.data(), dim_, size()};
  }
  const std::vector<ContentId>& ids() const { return ids_; }
  const std::vector<UserId>& creator_ids() const { return creator_ids_; }
  const std::vector<Iteration>& births() const { return births_; }
  ContentId next_id() const { return next_id_; }

  ContentItem item(Index slot) const;

  /// Appends a new item and returns its id. Ids are never reused.
  template <typename Derived>
  ContentId append(UserId creator, const Eigen::MatrixBase<Derived>& position, Iteration birth) {
    for (int c = 0; c < dim_; ++c) coords_.push_back(static_cast<double>(position(c)));
    ids_.push_back(next_id_);
    creator_ids_.push_back(creator);
    births_.push_back(birth);
    return next_id_++;
  }

  /// Drops every item whose weight at `now` is below `threshold`. Order and
  /// ids of survivors are preserved. Returns the number removed.
  Index prune(Iteration now, double lambda, double threshold);

  friend bool operator==(const ContentPool&, const ContentPool&) = default;

 private:
  int dim_;
  std::vector<double> coords_;
  std::vector<ContentId> ids_;
  std::vector<UserId> creator_ids_;
  std::vector<Iteration> births_;
  ContentId next_id_ = 0;
};

struct PopulationState {
  Iteration iteration = 0;
  PointsXd positions;                    // d x N, column i is user i
  std::vector<std::uint8_t> is_creator;  // size N
  ContentPool pool;

  Index n_users() const { return positions.cols(); }
  int dim() const { return static_cast<int>(positions.rows()); }
  UserState user(UserId id) const;
  std::int64_t creator_count() const;
};

bool operator==(const PopulationState& a, const PopulationState& b);

/// Weight of an item born at `birth_t` seen at `now_t`: exp(-lambda * age).
/// Throws std::logic_error if now_t < birth_t.
double content_weight(Iteration birth_t, Iteration now_t, double lambda);

/// Standard Gaussian user cloud with an exact, uniformly chosen creator subset.
PopulationState init_population(const SimulationParams& params, const RngPolicy& rng);

}  // namespace recsim
