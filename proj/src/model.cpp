#include "recsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace recsim {

namespace {

void require(bool ok, const char* field, const std::string& what) {
  if (!ok) throw std::invalid_argument(std::string(field) + ": " + what);
}

}  // namespace

void SimulationParams::validate() const {
  require(n_users > 0, "n_users", "must be positive");
  require(n_iterations >= 0, "n_iterations", "must be non-negative");
  require(dim >= 1, "dim", "must be at least 1");
  require(move_factor >= 0.0 && move_factor <= 1.0, "move_factor", "must lie in [0, 1]");
  require(p_produce >= 0.0 && p_produce <= 1.0, "p_produce", "must lie in [0, 1]");
  require(noise_sigma >= 0.0 && std::isfinite(noise_sigma), "noise_sigma", "must be >= 0");
  require(decay_lambda > 0.0 && std::isfinite(decay_lambda), "decay_lambda", "must be > 0");
  require(creator_fraction > 0.0 && creator_fraction <= 1.0, "creator_fraction",
          "must lie in (0, 1]");
  require(role_churn_prob >= 0.0 && role_churn_prob <= 1.0, "role_churn_prob",
          "must lie in [0, 1]");
  require(frac_min > 0.0 && frac_min < frac_max && frac_max < 1.0, "frac_min/frac_max",
          "need 0 < frac_min < frac_max < 1");
  require(prune_threshold > 0.0 && prune_threshold < 1.0, "prune_threshold",
          "must lie in (0, 1)");
  require(dbscan_eps > 0.0 && std::isfinite(dbscan_eps), "dbscan_eps", "must be > 0");
  require(dbscan_min_pts >= 1, "dbscan_min_pts", "must be >= 1");
}

std::int64_t SimulationParams::creator_count() const {
  // Guard against 0.1 * 1000 landing a hair above 100.
  const double raw = creator_fraction * static_cast<double>(n_users);
  const auto count = static_cast<std::int64_t>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
  return std::clamp<std::int64_t>(count, 1, n_users);
}

double content_weight(Iteration birth_t, Iteration now_t, double lambda) {
  if (now_t < birth_t) {
    throw std::logic_error("content_weight: item born at " + std::to_string(birth_t) +
                           " queried at earlier iteration " + std::to_string(now_t));
  }
  return std::exp(-lambda * static_cast<double>(now_t - birth_t));
}

ContentItem ContentPool::item(Index slot) const {
  if (slot < 0 || slot >= size()) throw std::out_of_range("ContentPool::item: bad slot");
  const auto s = static_cast<std::size_t>(slot);
  return {ids_[s], creator_ids_[s], positions().col(slot), births_[s]};
}

Index ContentPool::prune(Iteration now, double lambda, double threshold) {
  std::size_t keep = 0;
  const std::size_t n = ids_.size();
  const auto d = static_cast<std::size_t>(dim_);
  for (std::size_t i = 0; i < n; ++i) {
    if (content_weight(births_[i], now, lambda) < threshold) continue;
    if (keep != i) {
      std::copy_n(coords_.begin() + static_cast<std::ptrdiff_t>(i * d), d,
                  coords_.begin() + static_cast<std::ptrdiff_t>(keep * d));
      ids_[keep] = ids_[i];
      creator_ids_[keep] = creator_ids_[i];
      births_[keep] = births_[i];
    }
    ++keep;
  }
  coords_.resize(keep * d);
  ids_.resize(keep);
  creator_ids_.resize(keep);
  births_.resize(keep);
  return static_cast<Index>(n - keep);
}

UserState PopulationState::user(UserId id) const {
  if (id < 0 || id >= n_users()) throw std::out_of_range("PopulationState::user: bad id");
  return {id, positions.col(id), is_creator[static_cast<std::size_t>(id)] != 0};
}

std::int64_t PopulationState::creator_count() const {
  return std::count(is_creator.begin(), is_creator.end(), std::uint8_t{1});
}

bool operator==(const PopulationState& a, const PopulationState& b) {
  return a.iteration == b.iteration && a.positions.rows() == b.positions.rows() &&
         a.positions.cols() == b.positions.cols() && a.positions == b.positions &&
         a.is_creator == b.is_creator && a.pool == b.pool;
}

PopulationState init_population(const SimulationParams& params, const RngPolicy& rng) {
  params.validate();
  const Index n = params.n_users;
  PopulationState state;
  state.iteration = 0;
  state.positions.resize(params.dim, n);
  state.pool = ContentPool(params.dim);

  auto pos_stream = rng.stream(Purpose::kInit, 0, 0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Index i = 0; i < n; ++i)
    for (int c = 0; c < params.dim; ++c) state.positions(c, i) = gauss(pos_stream);

  // Partial Fisher-Yates: the first `creators` slots are a uniform sample
  // without replacement.
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  auto pick_stream = rng.stream(Purpose::kInit, 0, 1);
  const auto creators = static_cast<std::size_t>(params.creator_count());
  for (std::size_t i = 0; i < creators; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
    std::swap(order[i], order[pick(pick_stream)]);
  }
  state.is_creator.assign(static_cast<std::size_t>(n), 0);
  for (std::size_t i = 0; i < creators; ++i) state.is_creator[static_cast<std::size_t>(order[i])] = 1;
  return state;
}

}  // namespace recsim
