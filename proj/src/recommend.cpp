#include "recsim/recommend.hpp"

#include <cmath>

namespace recsim {

std::pair<Index, Index> k_bounds(Index n_items, double frac_min, double frac_max) {
  if (n_items < 1) throw std::invalid_argument("draw_k: pool must hold at least one item");
  const double n = static_cast<double>(n_items);
  // Fractions are decimal literals; absorb the binary rounding of e.g. 0.05 * 60.
  const double slack = 1e-9 * std::max(1.0, n);
  const auto lo = static_cast<Index>(std::ceil(frac_min * n - slack));
  const auto hi = static_cast<Index>(std::floor(frac_max * n + slack));
  const Index lower = std::clamp<Index>(lo, 1, n_items);
  const Index upper = std::clamp<Index>(hi, 1, n_items);
  return {lower, std::max(lower, upper)};
}

std::vector<double> pool_weights(const ContentPool& pool, Iteration now, double lambda) {
  std::vector<double> weights;
  weights.reserve(pool.births().size());
  for (Iteration birth : pool.births()) weights.push_back(content_weight(birth, now, lambda));
  return weights;
}

std::optional<VectorXd> recommend_target(const UserState& user, const PopulationState& state,
                                         const SimulationParams& params, const RngPolicy& rng) {
  const auto weights = pool_weights(state.pool, state.iteration, params.decay_lambda);
  return recommend_target(user, state, weights, params, rng);
}

std::optional<VectorXd> recommend_target(const UserState& user, const PopulationState& state,
                                         std::span<const double> weights,
                                         const SimulationParams& params, const RngPolicy& rng) {
  const ContentPool& pool = state.pool;
  if (pool.empty()) return std::nullopt;
  if (static_cast<Index>(weights.size()) != pool.size())
    throw std::invalid_argument("recommend_target: one weight per pool item required");

  auto gen = rng.stream(Purpose::kKDraw, static_cast<std::uint64_t>(state.iteration),
                        static_cast<std::uint64_t>(user.id));
  const Index k = draw_k(pool.size(), params.frac_min, params.frac_max, gen);
  const auto slots = k_nearest_columns(user.position, pool.positions(), std::span(pool.ids()), k);

  PointsXd chosen(pool.dim(), k);
  VectorXd chosen_weights(k);
  const auto all = pool.positions();
  for (Index j = 0; j < k; ++j) {
    const auto s = slots[static_cast<std::size_t>(j)];
    chosen.col(j) = all.col(s);
    chosen_weights(j) = weights[static_cast<std::size_t>(s)];
  }
  return weighted_median(chosen, chosen_weights);
}

}  // namespace recsim
