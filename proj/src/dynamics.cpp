#include "recsim/dynamics.hpp"

#include <random>

namespace recsim {

bool churn_roles(PopulationState& state, double prob, const RngPolicy& rng) {
  auto gen = rng.stream(Purpose::kChurn, static_cast<std::uint64_t>(state.iteration), 0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (!(coin(gen) < prob)) return false;

  std::vector<std::size_t> creators;
  std::vector<std::size_t> others;
  for (std::size_t i = 0; i < state.is_creator.size(); ++i)
    (state.is_creator[i] ? creators : others).push_back(i);
  if (creators.empty() || others.empty()) return false;

  std::uniform_int_distribution<std::size_t> pick_c(0, creators.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_o(0, others.size() - 1);
  const std::size_t demoted = creators[pick_c(gen)];
  const std::size_t promoted = others[pick_o(gen)];
  state.is_creator[demoted] = 0;
  state.is_creator[promoted] = 1;
  return true;
}

Index produce_content(PopulationState& state, double p_produce, const RngPolicy& rng) {
  auto gen = rng.stream(Purpose::kProduction, static_cast<std::uint64_t>(state.iteration), 0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  Index produced = 0;
  for (Index i = 0; i < state.n_users(); ++i) {
    if (!state.is_creator[static_cast<std::size_t>(i)]) continue;
    // One draw per creator regardless of p, so streams stay aligned.
    if (coin(gen) < p_produce) {
      state.pool.append(i, state.positions.col(i), state.iteration);
      ++produced;
    }
  }
  return produced;
}

Index prune_pool(PopulationState& state, const SimulationParams& params) {
  return state.pool.prune(state.iteration, params.decay_lambda, params.prune_threshold);
}

void advance(PopulationState& state, const SimulationParams& params, const RngPolicy& rng,
             int threads) {
  churn_roles(state, params.role_churn_prob, rng);
  produce_content(state, params.p_produce, rng);
  prune_pool(state, params);

  const Index n = state.n_users();
  PointsXd next(state.positions.rows(), n);
  const PopulationState& snapshot = state;
  const auto weights = pool_weights(snapshot.pool, snapshot.iteration, params.decay_lambda);
#pragma omp parallel for num_threads(threads > 0 ? threads : 1) schedule(static)
  for (Index i = 0; i < n; ++i) {
    const UserState user = snapshot.user(i);
    const auto target = recommend_target(user, snapshot, weights, params, rng);
    auto noise = rng.stream(Purpose::kNoise, static_cast<std::uint64_t>(snapshot.iteration),
                            static_cast<std::uint64_t>(i));
    next.col(i) = move_user(user.position, target, params.move_factor, params.noise_sigma, noise);
  }
  state.positions = std::move(next);
  ++state.iteration;
}

MetricsRecord snapshot_metrics(const PopulationState& state, const SimulationParams& params) {
  return compute_metrics(state.positions, state.iteration, state.pool.size(), params.dbscan_eps,
                         params.dbscan_min_pts);
}

MetricsRecord step(PopulationState& state, const SimulationParams& params, const RngPolicy& rng,
                   int threads) {
  advance(state, params, rng, threads);
  return snapshot_metrics(state, params);
}

RunResult run(const SimulationParams& params, const RunOptions& options) {
  params.validate();
  const RngPolicy rng(params.master_seed);
  RunResult result{init_population(params, rng), {}};
  PopulationState& state = result.final_state;
  const Iteration total = params.n_iterations;
  for (Iteration t = 0; t < total; ++t) {
    advance(state, params, rng, options.threads);
    const bool last = t + 1 == total;
    const bool due = options.metrics_every > 0 && (t + 1) % options.metrics_every == 0;
    if (due || last) result.history.push_back(snapshot_metrics(state, params));
  }
  return result;
}

}  // namespace recsim
