#include "recsim/theory.hpp"

#include "recsim/model.hpp"
#include "recsim/recommend.hpp"
#include "recsim/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

namespace recsim::theory {
namespace {

TEST(SimplifiedParams, Validation) {
  SimplifiedParams p;
  EXPECT_NO_THROW(p.validate());
  p.rho = 0.05;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.rho = 0.5;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.creator_positions = {1.0, 1.0};
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.creator_positions = {};
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(FixedFractionK, RoundsUp) {
  EXPECT_EQ(fixed_fraction_k(10, 0.3), 3);
  EXPECT_EQ(fixed_fraction_k(7, 0.3), 3);
  EXPECT_EQ(fixed_fraction_k(1, 0.3), 1);
  EXPECT_EQ(fixed_fraction_k(100, 0.3), 30);
  EXPECT_THROW(fixed_fraction_k(0, 0.3), std::invalid_argument);
}

TEST(RunSimplified, SingleAttractorHalvesDistance) {
  SimplifiedParams p;
  p.creator_positions = {0.0};
  p.alpha = 0.5;
  p.n_users = 20;
  p.n_iterations = 12;
  const auto r = run_simplified(p);
  ASSERT_EQ(r.trajectory.cols(), 13);
  ASSERT_EQ(r.spread_history.size(), 13u);
  for (Index t = 0; t < 12; ++t)
    for (Index i = 0; i < 20; ++i)
      EXPECT_NEAR(r.trajectory(i, t + 1), 0.5 * r.trajectory(i, t), 1e-15);
}

TEST(RunSimplified, TwoCreatorsGiveAtMostTwoClusters) {
  SimplifiedParams p;
  p.init_sigma = 0.9;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    p.master_seed = seed;
    const auto r = run_simplified(p);
    const Eigen::VectorXd final_pos = r.final_positions();
    const auto v = check_theorem(std::span<const double>(final_pos.data(), final_pos.size()),
                                 p.creator_positions, 0.1);
    EXPECT_TRUE(v.passed) << "seed " << seed;
    EXPECT_LE(v.n_clusters, 2);
  }
}

// Direct transcription of the update rule through the general-purpose
// selection and median routines, one user at a time.
Eigen::MatrixXd reference_trajectory(const SimplifiedParams& p) {
  const RngPolicy rng(p.master_seed);
  auto init = rng.stream(Purpose::kTheoryInit, 0, 0);
  std::normal_distribution<double> gauss(p.init_mu, p.init_sigma);
  Eigen::MatrixXd traj(p.n_users, p.n_iterations + 1);
  for (Index i = 0; i < p.n_users; ++i) traj(i, 0) = p.init_sigma > 0 ? gauss(init) : p.init_mu;
  ContentPool pool(1);
  for (Iteration t = 0; t < p.n_iterations; ++t) {
    for (std::size_t j = 0; j < p.creator_positions.size(); ++j)
      pool.append(static_cast<UserId>(j), Eigen::Matrix<double, 1, 1>(p.creator_positions[j]), t);
    pool.prune(t, p.decay_lambda, p.prune_threshold);
    const auto w = pool_weights(pool, t, p.decay_lambda);
    const Index k = fixed_fraction_k(pool.size(), p.rho);
    for (Index i = 0; i < p.n_users; ++i) {
      const Eigen::Matrix<double, 1, 1> x(traj(i, t));
      const auto cols = k_nearest_columns(x, pool.positions(), std::span(pool.ids()), k);
      Eigen::RowVectorXd v(k);
      Eigen::VectorXd wk(k);
      for (Index s = 0; s < k; ++s) {
        v(s) = pool.positions()(0, cols[static_cast<std::size_t>(s)]);
        wk(s) = w[static_cast<std::size_t>(cols[static_cast<std::size_t>(s)])];
      }
      double next = x(0) + p.alpha * (weighted_median(v, wk)(0) - x(0));
      if (p.noise_sigma > 0) {
        auto noise = rng.stream(Purpose::kNoise, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(i));
        next += std::normal_distribution<double>(0.0, p.noise_sigma)(noise);
      }
      traj(i, t + 1) = next;
    }
  }
  return traj;
}

TEST(RunSimplified, MatchesGeneralSelectionAndMedian) {
  std::vector<SimplifiedParams> cases(5);
  cases[0].creator_positions = {-1.0, 1.0};
  cases[0].init_sigma = 0.0;  // every user exactly between the creators
  cases[1].creator_positions = {-2.0, 0.0, 2.0};
  cases[1].init_mu = 1.0;
  cases[1].init_sigma = 0.0;
  cases[2].creator_positions = {-4.0, -2.0, 0.0, 2.0, 4.0};
  cases[2].init_sigma = 2.0;
  cases[3].noise_sigma = 0.05;
  cases[3].rho = 0.45;
  cases[4].creator_positions = {-1.0, -0.5, 0.25, 3.0};
  cases[4].decay_lambda = 0.1;
  cases[4].rho = 0.07;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    auto p = cases[c];
    p.n_users = 60;
    p.n_iterations = 80;
    p.master_seed = 100 + c;
    const auto fast = run_simplified(p).trajectory;
    const auto ref = reference_trajectory(p);
    EXPECT_LT((fast - ref).cwiseAbs().maxCoeff(), 1e-12) << "case " << c;
  }
}

TEST(RunSimplified, Reproducible) {
  SimplifiedParams p;
  p.noise_sigma = 0.01;
  p.master_seed = 4;
  EXPECT_EQ(run_simplified(p).trajectory, run_simplified(p).trajectory);
  const auto a = run_simplified(p);
  p.master_seed = 5;
  EXPECT_NE(run_simplified(p).trajectory, a.trajectory);
}

TEST(Spread1d, MatchesPairwiseSum) {
  EXPECT_EQ(spread_1d(std::vector<double>{}), 0.0);
  EXPECT_EQ(spread_1d(std::vector<double>{3.0}), 0.0);
  EXPECT_DOUBLE_EQ(spread_1d(std::vector<double>{0.0, 3.0, 1.0}), 6.0);
  std::vector<double> x{0.5, -1.25, 2.0, 2.0, -0.75, 10.0, 3.5};
  double brute = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) brute += std::abs(x[i] - x[j]);
  EXPECT_NEAR(spread_1d(x), brute, 1e-12 * brute);
}

TEST(GapClusters, SplitsOnGaps) {
  const std::vector<double> x{0.0, 0.05, 1.0, 1.02, 0.01, 5.0};
  const auto c = gap_cluster_centroids(x, 0.1);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_NEAR(c[0], 0.02, 1e-12);
  EXPECT_NEAR(c[1], 1.01, 1e-12);
  EXPECT_EQ(c[2], 5.0);
  EXPECT_TRUE(gap_cluster_centroids(std::vector<double>{}, 0.1).empty());
}

TEST(CheckTheorem, AllAtOneCreator) {
  const std::vector<double> creators{-1.0, 0.0, 1.0};
  const std::vector<double> users(10, 0.0);
  const auto v = check_theorem(users, creators, 0.1);
  EXPECT_TRUE(v.passed);
  EXPECT_EQ(v.n_clusters, 1);
}

TEST(CheckTheorem, SplitAtOuterCreators) {
  const std::vector<double> creators{-2.0, 0.0, 2.0};
  const std::vector<double> users{-2.0, -2.0, 2.0, 2.0, 2.0};
  const auto v = check_theorem(users, creators, 0.1);
  EXPECT_TRUE(v.passed);
  EXPECT_EQ(v.n_clusters, 2);
}

TEST(CheckTheorem, FlagsUserFrozenMidway) {
  const std::vector<double> two{-1.0, 1.0};
  const auto v = check_theorem(std::vector<double>{-1.0, -1.0, 0.0, 1.0}, two, 0.1);
  EXPECT_FALSE(v.passed);
  EXPECT_FALSE(v.count_within_bound);

  // With three creators the count fits, but the stray centroid does not.
  const std::vector<double> three{-2.0, 0.0, 2.0};
  const auto w = check_theorem(std::vector<double>{-2.0, 1.0, 2.0}, three, 0.1);
  EXPECT_FALSE(w.passed);
  EXPECT_TRUE(w.count_within_bound);
  EXPECT_FALSE(w.centroids_near_creators);
}

TEST(CheckTheorem, SeparateCentroidTolerance) {
  const std::vector<double> creators{0.0};
  const std::vector<double> users{0.08, 0.08};
  EXPECT_TRUE(check_theorem(users, creators, 0.1).passed);
  EXPECT_FALSE(check_theorem(users, creators, 0.1, 0.05).passed);
}

TEST(Contraction, DecreasingAndConstantPass) {
  std::vector<double> dec(50);
  for (std::size_t i = 0; i < dec.size(); ++i) dec[i] = 100.0 - static_cast<double>(i);
  EXPECT_TRUE(check_spread_contraction(dec, 1).passed);
  EXPECT_TRUE(check_spread_contraction(dec, 10).passed);
  EXPECT_TRUE(check_spread_contraction(std::vector<double>(40, 3.0), 10).passed);
}

TEST(Contraction, ReportsFirstViolation) {
  std::vector<double> h(30, 5.0);
  h[25] = 6.0;
  const auto v = check_spread_contraction(h, 5);
  EXPECT_FALSE(v.passed);
  ASSERT_TRUE(v.first_violation);
  EXPECT_EQ(*v.first_violation, 16);  // first window pair whose later half holds index 25
  EXPECT_THROW(check_spread_contraction(h, 0), std::invalid_argument);
}

TEST(Contraction, ShortHistoryPassesVacuously) {
  EXPECT_TRUE(check_spread_contraction(std::vector<double>{1.0, 2.0}, 10).passed);
}

TEST(Boundedness, InsideAndOutside) {
  const std::vector<double> creators{-1.0, 1.0};
  const std::vector<double> initial{-0.5, 2.0};
  Eigen::MatrixXd traj(2, 3);
  traj << -0.5, -0.7, -1.0,  //
      2.0, 1.5, 1.0;
  EXPECT_TRUE(check_boundedness(traj, creators, initial));
  traj(0, 2) = -1.0 - 1e-9;
  EXPECT_FALSE(check_boundedness(traj, creators, initial));
}

TEST(RunChecks, DefaultsPass) {
  const auto r = run_checks(SimplifiedParams{});
  EXPECT_TRUE(r.all_passed());
  ASSERT_TRUE(r.boundedness);
  EXPECT_LT(r.spread_ratio, 1.0);
}

TEST(RunChecks, NoAdaptationFails) {
  SimplifiedParams p;
  p.alpha = 0.0;
  const auto r = run_checks(p);
  EXPECT_FALSE(r.all_passed());
  EXPECT_FALSE(r.theorem.passed);
  EXPECT_EQ(r.spread_ratio, 1.0);
}

TEST(RunChecks, NoiseSkipsBoundedness) {
  SimplifiedParams p;
  p.noise_sigma = 0.01;
  EXPECT_FALSE(run_checks(p).boundedness.has_value());
}

TEST(RunChecks, ThreeCreatorsContractStrongly) {
  SimplifiedParams p;
  p.creator_positions = {-2.0, 0.0, 2.0};
  p.init_sigma = 0.2;
  CheckOptions o;
  o.centroid_tolerance = 0.05;
  o.contraction_ratio = 0.05;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    p.master_seed = seed;
    const auto r = run_checks(p, o);
    EXPECT_TRUE(r.all_passed()) << "seed " << seed;
    EXPECT_LT(r.spread_ratio, 0.05);
  }
}

}  // namespace
}  // namespace recsim::theory
