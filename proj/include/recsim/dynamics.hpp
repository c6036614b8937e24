#pragma once

#include "recsim/metrics.hpp"
#include "recsim/model.hpp"
#include "recsim/recommend.hpp"
#include "recsim/rng.hpp"

#include <optional>
#include <random>
#include <vector>

namespace recsim {

/// With probability `prob`, swaps the roles of one uniformly chosen creator
/// and one uniformly chosen non-creator. Returns true when a swap happened.
bool churn_roles(PopulationState& state, double prob, const RngPolicy& rng);

/// Each creator, in ascending id order, emits one item at its current
/// position with probability `p_produce`. Returns the number of new items.
Index produce_content(PopulationState& state, double p_produce, const RngPolicy& rng);

/// Removes items whose weight at the current iteration fell below the
/// prune threshold. Returns the number removed.
Index prune_pool(PopulationState& state, const SimulationParams& params);

/// u + alpha (m - u) + eta, eta ~ N(0, sigma^2 I). Without a target the
/// median term is dropped but the noise is still applied.
template <typename URBG>
VectorXd move_user(const VectorXd& u, const std::optional<VectorXd>& target, double alpha,
                   double sigma, URBG& gen) {
  VectorXd next = u;
  if (target) next += alpha * (*target - u);
  if (sigma > 0.0) {
    std::normal_distribution<double> eta(0.0, sigma);
    for (Index c = 0; c < next.size(); ++c) next(c) += eta(gen);
  }
  return next;
}

/// One synchronous iteration: churn, produce, prune, then every user moves
/// against the same pool snapshot. Positions change only after all targets
/// are known. `threads` only affects speed, never the result.
void advance(PopulationState& state, const SimulationParams& params, const RngPolicy& rng,
             int threads = 1);

/// advance() followed by the metrics of the new positions.
MetricsRecord step(PopulationState& state, const SimulationParams& params, const RngPolicy& rng,
                   int threads = 1);

MetricsRecord snapshot_metrics(const PopulationState& state, const SimulationParams& params);

struct RunOptions {
  int threads = 1;
  // Record metrics every this many iterations; 0 records only the last one.
  Iteration metrics_every = 1;
};

struct RunResult {
  PopulationState final_state;
  std::vector<MetricsRecord> history;
};

/// Full run from init_population for params.n_iterations steps.
RunResult run(const SimulationParams& params, const RunOptions& options = {});

}  // namespace recsim
