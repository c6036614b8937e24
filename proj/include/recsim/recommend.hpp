#pragma once

#include "recsim/model.hpp"
#include "recsim/rng.hpp"
#include "recsim/types.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace recsim {

struct RecommendationSet {
  UserId user_id = -1;
  std::vector<ContentId> item_ids;  // ascending (distance, id)
  std::vector<Index> slots;         // matching pool slots
  Index k = 0;
};

/// Integer neighbourhood size drawn uniformly from
/// [max(1, ceil(frac_min n)), max(1, floor(frac_max n))]. An empty interval
/// collapses to its lower end. Throws std::invalid_argument for n_items < 1.
template <typename URBG>
Index draw_k(Index n_items, double frac_min, double frac_max, URBG& gen);

/// Bounds of the draw_k interval, exposed for tests and diagnostics.
std::pair<Index, Index> k_bounds(Index n_items, double frac_min, double frac_max);

/// Column indices of the k points nearest to `query`, ordered by
/// (squared distance, id). `ids` breaks ties; it must have points.cols()
/// entries. Partial selection, O(n log k).
template <typename DerivedQ, typename DerivedP>
std::vector<Index> k_nearest_columns(const Eigen::MatrixBase<DerivedQ>& query,
                                     const Eigen::MatrixBase<DerivedP>& points,
                                     std::span<const ContentId> ids, Index k) {
  const Index n = points.cols();
  if (k < 1 || k > n) throw std::out_of_range("k_nearest_columns: k must lie in [1, n]");
  if (static_cast<Index>(ids.size()) != n)
    throw std::invalid_argument("k_nearest_columns: ids/points size mismatch");
  struct Candidate {
    double dist2;
    Index column;
  };
  // Distance ties are rare; only then is the id consulted.
  auto closer = [&ids](const Candidate& a, const Candidate& b) {
    if (a.dist2 != b.dist2) return a.dist2 < b.dist2;
    return ids[static_cast<std::size_t>(a.column)] < ids[static_cast<std::size_t>(b.column)];
  };
  std::vector<Candidate> candidates(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j)
    candidates[static_cast<std::size_t>(j)] = {
        static_cast<double>((points.col(j) - query).squaredNorm()), j};
  const auto kth = candidates.begin() + k;
  if (kth != candidates.end())
    std::nth_element(candidates.begin(), kth - 1, candidates.end(), closer);
  std::sort(candidates.begin(), kth, closer);
  std::vector<Index> out(static_cast<std::size_t>(k));
  for (Index j = 0; j < k; ++j)
    out[static_cast<std::size_t>(j)] = candidates[static_cast<std::size_t>(j)].column;
  return out;
}

/// The k pool items nearest to `user_pos`.
template <typename Derived>
RecommendationSet nearest_k(const Eigen::MatrixBase<Derived>& user_pos, const ContentPool& pool,
                            Index k) {
  RecommendationSet rec;
  rec.k = k;
  rec.slots = k_nearest_columns(user_pos, pool.positions(), std::span(pool.ids()), k);
  rec.item_ids.reserve(rec.slots.size());
  for (Index s : rec.slots) rec.item_ids.push_back(pool.ids()[static_cast<std::size_t>(s)]);
  return rec;
}

/// Lower weighted median of one coordinate: the smallest value v whose
/// cumulative weight (over values <= v) reaches half the total.
template <typename DerivedV, typename DerivedW>
typename DerivedV::Scalar weighted_median_1d(const Eigen::MatrixBase<DerivedV>& values,
                                             const Eigen::MatrixBase<DerivedW>& weights) {
  using Scalar = typename DerivedV::Scalar;
  using Weight = typename DerivedW::Scalar;
  const Index n = values.size();
  // Equal values are interchangeable, so an unstable sort yields the same answer.
  std::vector<std::pair<Scalar, Weight>> sorted(static_cast<std::size_t>(n));
  Weight total = 0;
  for (Index j = 0; j < n; ++j) {
    sorted[static_cast<std::size_t>(j)] = {values(j), weights(j)};
    total += weights(j);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  const Weight half = total / 2;
  Weight cum = 0;
  for (const auto& [value, weight] : sorted) {
    cum += weight;
    if (cum >= half) return value;
  }
  return sorted.back().first;
}

/// Component-wise lower weighted median of the columns of `positions`.
/// Throws std::invalid_argument on empty input, size mismatch, or a
/// non-positive weight.
template <typename DerivedP, typename DerivedW>
Vector<typename DerivedP::Scalar> weighted_median(const Eigen::MatrixBase<DerivedP>& positions,
                                                  const Eigen::MatrixBase<DerivedW>& weights) {
  if (positions.cols() == 0) throw std::invalid_argument("weighted_median: empty input");
  if (weights.size() != positions.cols())
    throw std::invalid_argument("weighted_median: positions/weights size mismatch");
  if (!(weights.array() > 0).all())
    throw std::invalid_argument("weighted_median: weights must be positive");
  Vector<typename DerivedP::Scalar> median(positions.rows());
  for (Index c = 0; c < positions.rows(); ++c)
    median(c) = weighted_median_1d(positions.row(c).transpose(), weights);
  return median;
}

/// Median target for one user against the current pool, or nullopt when the
/// pool is empty. k is drawn from the user's own stream for this iteration.
std::optional<VectorXd> recommend_target(const UserState& user, const PopulationState& state,
                                         const SimulationParams& params, const RngPolicy& rng);

/// content_weight of every pool slot at iteration `now`.
std::vector<double> pool_weights(const ContentPool& pool, Iteration now, double lambda);

/// recommend_target with the slot weights supplied by the caller, so a full
/// iteration evaluates each exp() once instead of once per user.
std::optional<VectorXd> recommend_target(const UserState& user, const PopulationState& state,
                                         std::span<const double> weights,
                                         const SimulationParams& params, const RngPolicy& rng);

// --- implementation ---------------------------------------------------------

template <typename URBG>
Index draw_k(Index n_items, double frac_min, double frac_max, URBG& gen) {
  const auto [lo, hi] = k_bounds(n_items, frac_min, frac_max);
  if (hi <= lo) return lo;
  std::uniform_int_distribution<Index> dist(lo, hi);
  return dist(gen);
}

}  // namespace recsim
