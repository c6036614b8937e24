#include "recsim/dynamics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace recsim {
namespace {

SimulationParams small_params(std::int64_t n = 200) {
  SimulationParams p;
  p.n_users = n;
  p.n_iterations = 50;
  return p;
}

TEST(Churn, ZeroProbabilityNeverSwaps) {
  const auto p = small_params();
  const RngPolicy rng(3);
  auto s = init_population(p, rng);
  const auto roles = s.is_creator;
  for (Iteration t = 0; t < 1000; ++t) {
    s.iteration = t;
    EXPECT_FALSE(churn_roles(s, 0.0, rng));
  }
  EXPECT_EQ(s.is_creator, roles);
}

TEST(Churn, CertainSwapWithTwoUsersExchangesRoles) {
  SimulationParams p = small_params(2);
  p.creator_fraction = 0.5;
  const RngPolicy rng(1);
  auto s = init_population(p, rng);
  const auto before = s.is_creator;
  ASSERT_TRUE(churn_roles(s, 1.0, rng));
  EXPECT_EQ(s.is_creator[0], before[1]);
  EXPECT_EQ(s.is_creator[1], before[0]);
  EXPECT_EQ(s.creator_count(), 1);
}

TEST(Churn, SwapCountIsBinomial) {
  const auto p = small_params();
  const RngPolicy rng(17);
  auto s = init_population(p, rng);
  constexpr int kIters = 10000;
  int swaps = 0;
  for (Iteration t = 0; t < kIters; ++t) {
    s.iteration = t;
    swaps += churn_roles(s, 0.01, rng);
    ASSERT_EQ(s.creator_count(), p.creator_count());
  }
  const double sd = std::sqrt(kIters * 0.01 * 0.99);
  EXPECT_NEAR(swaps, 100.0, 4 * sd);
}

TEST(Produce, NothingAtZeroProbability) {
  const auto p = small_params();
  const RngPolicy rng(1);
  auto s = init_population(p, rng);
  EXPECT_EQ(produce_content(s, 0.0, rng), 0);
  EXPECT_TRUE(s.pool.empty());
}

TEST(Produce, EveryCreatorAtProbabilityOne) {
  const auto p = small_params(1000);
  const RngPolicy rng(1);
  auto s = init_population(p, rng);
  s.iteration = 4;
  EXPECT_EQ(produce_content(s, 1.0, rng), 100);
  ASSERT_EQ(s.pool.size(), 100);
  for (Index slot = 0; slot < s.pool.size(); ++slot) {
    const auto item = s.pool.item(slot);
    EXPECT_TRUE(s.is_creator[static_cast<std::size_t>(item.creator_id)]);
    EXPECT_EQ(item.birth_iteration, 4);
    EXPECT_EQ(item.position, VectorXd(s.positions.col(item.creator_id)));
    if (slot > 0) EXPECT_LT(s.pool.item(slot - 1).creator_id, item.creator_id);
  }
}

TEST(Produce, MeanMatchesProbability) {
  const auto p = small_params(1000);
  const RngPolicy rng(23);
  auto s = init_population(p, rng);
  constexpr int kIters = 1000;
  Index total = 0;
  for (Iteration t = 0; t < kIters; ++t) {
    s.iteration = t;
    total += produce_content(s, 0.2, rng);
  }
  const double sd = std::sqrt(kIters * 100 * 0.2 * 0.8);
  EXPECT_NEAR(static_cast<double>(total), kIters * 20.0, 3 * sd);
}

TEST(Prune, AgeTenSurvivesAgeElevenDoesNot) {
  const auto p = small_params();
  PopulationState s = init_population(p, RngPolicy(1));
  const Eigen::Vector2d x(0, 0);
  s.pool.append(0, x, 0);
  s.pool.append(0, x, 1);
  s.iteration = 11;
  EXPECT_EQ(prune_pool(s, p), 1);
  ASSERT_EQ(s.pool.size(), 1);
  EXPECT_EQ(s.pool.births()[0], 1);
}

TEST(Prune, OrderWithProductionDoesNotMatter) {
  const auto p = small_params(500);
  const RngPolicy rng(8);
  auto a = init_population(p, rng);
  for (Iteration t = 0; t < 30; ++t) {
    a.iteration = t;
    produce_content(a, 0.3, rng);
  }
  auto b = a;
  a.iteration = b.iteration = 35;
  produce_content(a, 0.3, rng);
  prune_pool(a, p);
  prune_pool(b, p);
  produce_content(b, 0.3, rng);
  EXPECT_EQ(a.pool.ids(), b.pool.ids());
  EXPECT_EQ(a.pool.births(), b.pool.births());
}

TEST(MoveUser, FullStepReachesTarget) {
  SplitMix64 gen(0);
  const VectorXd u = Eigen::Vector2d(0.0, 0.0);
  const VectorXd m = Eigen::Vector2d(1.0, 0.0);
  EXPECT_EQ(move_user(u, m, 1.0, 0.0, gen), m);
  EXPECT_TRUE(move_user(u, m, 0.01, 0.0, gen).isApprox(Eigen::Vector2d(0.01, 0.0)));
  EXPECT_EQ(move_user(u, m, 0.0, 0.0, gen), u);
}

TEST(MoveUser, NoTargetNoNoiseStaysPut) {
  SplitMix64 gen(0);
  const VectorXd u = Eigen::Vector2d(0.3, -0.7);
  EXPECT_EQ(move_user(u, std::nullopt, 0.5, 0.0, gen), u);
}

TEST(MoveUser, ContractsDistanceToTarget) {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  std::uniform_real_distribution<double> alpha(0.0, 1.0);
  SplitMix64 unused(0);
  for (int trial = 0; trial < 1000; ++trial) {
    const VectorXd u = Eigen::Vector2d(coord(gen), coord(gen));
    const VectorXd m = Eigen::Vector2d(coord(gen), coord(gen));
    const double a = alpha(gen);
    const VectorXd next = move_user(u, m, a, 0.0, unused);
    EXPECT_NEAR((next - m).norm(), (1 - a) * (u - m).norm(), 1e-12);
  }
}

TEST(MoveUser, NoiseHasRequestedSpread) {
  SplitMix64 gen(99);
  const VectorXd u = Eigen::Vector2d::Zero();
  constexpr int kSamples = 100000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < kSamples; ++i) {
    const VectorXd x = move_user(u, std::nullopt, 0.0, 0.01, gen);
    sum += x(0) + x(1);
    sum2 += x.squaredNorm();
  }
  const double n = 2.0 * kSamples;
  const double mean = sum / n;
  const double sd = std::sqrt(sum2 / n - mean * mean);
  EXPECT_NEAR(mean, 0.0, 4 * 0.01 / std::sqrt(n));
  EXPECT_NEAR(sd, 0.01, 0.01 * 0.01);
}

TEST(Step, EmptyPoolWithoutNoiseLeavesUsersInPlace) {
  SimulationParams p = small_params(100);
  p.p_produce = 0.0;
  p.noise_sigma = 0.0;
  const RngPolicy rng(4);
  auto s = init_population(p, rng);
  const PointsXd before = s.positions;
  for (int t = 0; t < 5; ++t) advance(s, p, rng);
  EXPECT_EQ(s.positions, before);
  EXPECT_EQ(s.iteration, 5);
}

TEST(Step, SingleCreatorPullsEveryoneToIt) {
  SimulationParams p = small_params(50);
  p.creator_fraction = 0.02;  // exactly one creator
  p.p_produce = 1.0;
  p.noise_sigma = 0.0;
  p.move_factor = 1.0;
  p.role_churn_prob = 0.0;
  const RngPolicy rng(6);
  auto s = init_population(p, rng);
  ASSERT_EQ(s.creator_count(), 1);
  Index creator = 0;
  while (!s.is_creator[static_cast<std::size_t>(creator)]) ++creator;
  const VectorXd where = s.positions.col(creator);
  advance(s, p, rng);
  // u + (m - u) can differ from m in the last bit.
  for (Index i = 0; i < s.n_users(); ++i)
    EXPECT_LT((s.positions.col(i) - where).cwiseAbs().maxCoeff(), 1e-15 * (1 + where.norm()));
}

TEST(Step, ThreadCountDoesNotChangeResult) {
  const auto p = small_params(300);
  const RngPolicy rng(12);
  auto a = init_population(p, rng);
  auto b = a;
  for (int t = 0; t < 100; ++t) {
    const auto ma = step(a, p, rng, 1);
    const auto mb = step(b, p, rng, 4);
    ASSERT_EQ(ma, mb) << "iteration " << t;
  }
  EXPECT_TRUE(a == b);
}

TEST(Step, PoolNeverExceedsCreatorCeiling) {
  SimulationParams p = small_params(400);
  p.p_produce = 1.0;
  const RngPolicy rng(5);
  auto s = init_population(p, rng);
  for (int t = 0; t < 60; ++t) {
    advance(s, p, rng);
    EXPECT_LE(s.pool.size(), p.creator_count() * 11);
    EXPECT_EQ(s.creator_count(), p.creator_count());
  }
  EXPECT_EQ(s.pool.size(), p.creator_count() * 11);  // saturated: ages 0..10
}

TEST(Step, PoolSettlesNearExpectedSize) {
  SimulationParams p = small_params(1000);
  const RngPolicy rng(7);
  auto s = init_population(p, rng);
  double total = 0;
  int samples = 0;
  for (int t = 0; t < 200; ++t) {
    advance(s, p, rng);
    if (t >= 20) {
      total += static_cast<double>(s.pool.size());
      ++samples;
    }
  }
  EXPECT_NEAR(total / samples, 100 * 0.2 * 11, 10.0);
}

TEST(Run, ZeroIterationsReturnsInitialState) {
  SimulationParams p = small_params(100);
  p.n_iterations = 0;
  const auto r = run(p);
  EXPECT_TRUE(r.history.empty());
  EXPECT_TRUE(r.final_state == init_population(p, RngPolicy(p.master_seed)));
}

TEST(Run, SameSeedSameHistory) {
  SimulationParams p = small_params(150);
  p.master_seed = 77;
  const auto a = run(p);
  const auto b = run(p, RunOptions{.threads = 3});
  EXPECT_EQ(a.history, b.history);
  ASSERT_EQ(a.history.size(), 50u);
  EXPECT_EQ(a.history.back().iteration, 50);
  p.master_seed = 78;
  EXPECT_NE(run(p).history, a.history);
}

TEST(Run, MetricsCadence) {
  SimulationParams p = small_params(100);
  p.n_iterations = 25;
  EXPECT_EQ(run(p, {.metrics_every = 10}).history.size(), 3u);  // 10, 20, 25
  EXPECT_EQ(run(p, {.metrics_every = 0}).history.size(), 1u);
}

}  // namespace
}  // namespace recsim
