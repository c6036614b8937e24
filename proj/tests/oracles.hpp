#pragma once

// Slow reference implementations used only by tests. Each one is written
// from the definition rather than from the production code path.

#include "recsim/metrics.hpp"
#include "recsim/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace recsim::oracle {

/// Full sort by (Euclidean distance, id); first k column indices.
inline std::vector<Index> knn_full_sort(const VectorXd& query, const PointsXd& points,
                                        const std::vector<ContentId>& ids, Index k) {
  std::vector<Index> order(static_cast<std::size_t>(points.cols()));
  std::iota(order.begin(), order.end(), Index{0});
  auto dist2 = [&](Index j) {
    double s = 0.0;
    for (Index c = 0; c < points.rows(); ++c) {
      const double d = points(c, j) - query(c);
      s += d * d;
    }
    return s;
  };
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    const double da = dist2(a), db = dist2(b);
    if (da != db) return da < db;
    return ids[static_cast<std::size_t>(a)] < ids[static_cast<std::size_t>(b)];
  });
  order.resize(static_cast<std::size_t>(k));
  return order;
}

/// Smallest input value minimising sum_j w_j |v - x_j|, found by trying
/// every candidate. Costs within a relative 1e-9 count as tied.
inline double l1_median_1d(const std::vector<double>& values, const std::vector<double>& weights) {
  std::vector<double> cost(values.size());
  double best = std::numeric_limits<double>::infinity();
  double scale = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    double c = 0.0;
    for (std::size_t j = 0; j < values.size(); ++j) c += weights[j] * std::abs(values[i] - values[j]);
    cost[i] = c;
    best = std::min(best, c);
    scale = std::max(scale, c);
  }
  double answer = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i)
    if (cost[i] <= best + 1e-9 * std::max(1.0, scale)) answer = std::min(answer, values[i]);
  return answer;
}

/// DBSCAN from its characterisation: core points by brute-force counting,
/// clusters as connected components of the core graph numbered by their
/// smallest core index, and each border point given to the lowest-numbered
/// cluster with a core point in reach.
inline ClusterLabeling dbscan_reference(const PointsXd& points, double eps, int min_pts) {
  const Index n = points.cols();
  auto near = [&](Index a, Index b) { return (points.col(a) - points.col(b)).squaredNorm() <= eps * eps; };
  std::vector<char> core(static_cast<std::size_t>(n), 0);
  for (Index i = 0; i < n; ++i) {
    int count = 0;
    for (Index j = 0; j < n; ++j) count += near(i, j);
    core[static_cast<std::size_t>(i)] = count >= min_pts;
  }
  ClusterLabeling out;
  out.eps = eps;
  out.min_pts = min_pts;
  out.labels.assign(static_cast<std::size_t>(n), ClusterLabeling::kNoise);
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  for (Index i = 0; i < n; ++i) {
    if (!core[static_cast<std::size_t>(i)] || comp[static_cast<std::size_t>(i)] >= 0) continue;
    const int id = out.n_clusters++;
    std::vector<Index> stack{i};
    comp[static_cast<std::size_t>(i)] = id;
    while (!stack.empty()) {
      const Index a = stack.back();
      stack.pop_back();
      for (Index b = 0; b < n; ++b)
        if (core[static_cast<std::size_t>(b)] && comp[static_cast<std::size_t>(b)] < 0 && near(a, b)) {
          comp[static_cast<std::size_t>(b)] = id;
          stack.push_back(b);
        }
    }
  }
  for (Index i = 0; i < n; ++i) {
    if (core[static_cast<std::size_t>(i)]) {
      out.labels[static_cast<std::size_t>(i)] = comp[static_cast<std::size_t>(i)];
      continue;
    }
    int best = ClusterLabeling::kNoise;
    for (Index j = 0; j < n; ++j)
      if (core[static_cast<std::size_t>(j)] && near(i, j)) {
        const int c = comp[static_cast<std::size_t>(j)];
        if (best == ClusterLabeling::kNoise || c < best) best = c;
      }
    out.labels[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

/// Random point set mixing a few tight blobs with scattered points, so that
/// core, border and noise points all occur.
inline PointsXd random_blobs(std::mt19937_64& gen, Index n, int dim = 2) {
  std::uniform_int_distribution<int> n_blobs(1, 4);
  std::uniform_real_distribution<double> centre(-2.0, 2.0);
  std::uniform_real_distribution<double> spread(0.05, 0.4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int blobs = n_blobs(gen);
  PointsXd c(dim, blobs);
  std::vector<double> s(static_cast<std::size_t>(blobs));
  for (int b = 0; b < blobs; ++b) {
    for (int d = 0; d < dim; ++d) c(d, b) = centre(gen);
    s[static_cast<std::size_t>(b)] = spread(gen);
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, blobs - 1);
  PointsXd points(dim, n);
  for (Index i = 0; i < n; ++i) {
    if (unit(gen) < 0.15) {
      for (int d = 0; d < dim; ++d) points(d, i) = centre(gen);
    } else {
      const int b = pick(gen);
      for (int d = 0; d < dim; ++d) points(d, i) = c(d, b) + s[static_cast<std::size_t>(b)] * gauss(gen);
    }
  }
  return points;
}

}  // namespace recsim::oracle
