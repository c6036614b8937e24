#pragma once

#include "recsim/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace recsim {

struct ClusterLabeling {
  static constexpr int kNoise = -1;

  std::vector<int> labels;  // cluster id in [0, n_clusters) or kNoise
  int n_clusters = 0;
  double eps = 0.0;
  int min_pts = 0;

  Index noise_count() const {
    return std::count(labels.begin(), labels.end(), kNoise);
  }
};

struct InterClusterDistances {
  double avg = 0.0;
  double min = 0.0;
};

/// Per-iteration polarization snapshot.
struct MetricsRecord {
  Iteration iteration = 0;
  int n_clusters = 0;
  double avg_cluster_variance = 0.0;
  std::optional<double> avg_inter_cluster_dist;
  std::optional<double> min_inter_cluster_dist;
  double pairwise_spread = 0.0;
  Index pool_size = 0;

  friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

namespace detail {

/// Uniform grid with cell side eps for fixed-radius queries. Falls back to a
/// linear scan when the 3^d stencil would outgrow the point count.
template <typename Derived>
class EpsGrid {
 public:
  EpsGrid(const Eigen::MatrixBase<Derived>& points, double eps)
      : points_(points), eps2_(eps * eps), dim_(points.rows()), n_(points.cols()) {
    std::int64_t stencil = 1;
    for (Index c = 0; c < dim_ && stencil <= n_; ++c) stencil *= 3;
    brute_ = dim_ == 0 || stencil > n_;
    if (brute_) return;

    keys_.resize(static_cast<std::size_t>(n_ * dim_));
    for (Index i = 0; i < n_; ++i)
      for (Index c = 0; c < dim_; ++c)
        keys_[key_index(i, c)] =
            static_cast<std::int64_t>(std::floor(static_cast<double>(points(c, i)) / eps));
    order_.resize(static_cast<std::size_t>(n_));
    for (Index i = 0; i < n_; ++i) order_[static_cast<std::size_t>(i)] = i;
    std::sort(order_.begin(), order_.end(), [&](Index a, Index b) {
      const int cmp = compare(key_of(a), key_of(b));
      return cmp != 0 ? cmp < 0 : a < b;
    });
    for (std::size_t s = 0; s < order_.size(); ++s) {
      if (s == 0 || compare(key_of(order_[s - 1]), key_of(order_[s])) != 0)
        cell_start_.push_back(s);
    }
    cell_start_.push_back(order_.size());

    offsets_.assign(1, std::vector<std::int64_t>(static_cast<std::size_t>(dim_), 0));
    for (Index c = 0; c < dim_; ++c) {
      std::vector<std::vector<std::int64_t>> next;
      for (const auto& o : offsets_)
        for (std::int64_t delta = -1; delta <= 1; ++delta) {
          auto e = o;
          e[static_cast<std::size_t>(c)] = delta;
          next.push_back(std::move(e));
        }
      offsets_ = std::move(next);
    }
  }

  /// Indices within distance eps of point p (p included), in unspecified order.
  void query(Index p, std::vector<Index>& out) const {
    out.clear();
    if (brute_) {
      for (Index j = 0; j < n_; ++j)
        if (within(p, j)) out.push_back(j);
      return;
    }
    std::vector<std::int64_t> probe(static_cast<std::size_t>(dim_));
    const std::int64_t* home = key_of(p);
    for (const auto& o : offsets_) {
      for (Index c = 0; c < dim_; ++c)
        probe[static_cast<std::size_t>(c)] = home[c] + o[static_cast<std::size_t>(c)];
      const auto cell = find_cell(probe.data());
      if (!cell) continue;
      for (std::size_t s = cell_start_[*cell]; s < cell_start_[*cell + 1]; ++s) {
        const Index j = order_[s];
        if (within(p, j)) out.push_back(j);
      }
    }
  }

 private:
  std::size_t key_index(Index i, Index c) const { return static_cast<std::size_t>(i * dim_ + c); }
  const std::int64_t* key_of(Index i) const { return keys_.data() + i * dim_; }

  int compare(const std::int64_t* a, const std::int64_t* b) const {
    for (Index c = 0; c < dim_; ++c) {
      if (a[c] < b[c]) return -1;
      if (a[c] > b[c]) return 1;
    }
    return 0;
  }

  std::optional<std::size_t> find_cell(const std::int64_t* key) const {
    std::size_t lo = 0;
    std::size_t hi = cell_start_.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (compare(key_of(order_[cell_start_[mid]]), key) < 0)
        lo = mid + 1;
      else
        hi = mid;
    }
    if (lo < cell_start_.size() - 1 && compare(key_of(order_[cell_start_[lo]]), key) == 0)
      return lo;
    return std::nullopt;
  }

  bool within(Index a, Index b) const {
    return static_cast<double>((points_.col(a) - points_.col(b)).squaredNorm()) <= eps2_;
  }

  const Eigen::MatrixBase<Derived>& points_;
  double eps2_;
  Index dim_;
  Index n_;
  bool brute_ = true;
  std::vector<std::int64_t> keys_;
  std::vector<Index> order_;
  std::vector<std::size_t> cell_start_;
  std::vector<std::vector<std::int64_t>> offsets_;
};

}  // namespace detail

/// DBSCAN with Euclidean metric. A point is core when at least min_pts points
/// (itself included) lie within distance eps. Points are scanned in index
/// order; a border point joins the first cluster that reaches it.
template <typename Derived>
ClusterLabeling dbscan(const Eigen::MatrixBase<Derived>& points, double eps, int min_pts) {
  if (!(eps > 0.0)) throw std::invalid_argument("dbscan: eps must be positive");
  if (min_pts < 1) throw std::invalid_argument("dbscan: min_pts must be >= 1");
  constexpr int kUnvisited = -2;
  const Index n = points.cols();
  ClusterLabeling out;
  out.eps = eps;
  out.min_pts = min_pts;
  out.labels.assign(static_cast<std::size_t>(n), kUnvisited);
  if (n == 0) return out;

  const detail::EpsGrid<Derived> grid(points, eps);
  std::vector<Index> neighbours;
  std::vector<Index> frontier;
  auto label = [&](Index i) -> int& { return out.labels[static_cast<std::size_t>(i)]; };

  for (Index p = 0; p < n; ++p) {
    if (label(p) != kUnvisited) continue;
    grid.query(p, neighbours);
    if (static_cast<Index>(neighbours.size()) < min_pts) {
      label(p) = ClusterLabeling::kNoise;
      continue;
    }
    const int cluster = out.n_clusters++;
    label(p) = cluster;
    frontier.clear();
    for (Index q : neighbours)
      if (label(q) < 0) frontier.push_back(q);
    for (std::size_t f = 0; f < frontier.size(); ++f) {
      const Index q = frontier[f];
      if (label(q) == ClusterLabeling::kNoise) {
        label(q) = cluster;  // border point, already known to be non-core
        continue;
      }
      if (label(q) != kUnvisited) continue;
      label(q) = cluster;
      grid.query(q, neighbours);
      if (static_cast<Index>(neighbours.size()) >= min_pts)
        for (Index r : neighbours)
          if (label(r) < 0) frontier.push_back(r);
    }
  }
  return out;
}

/// Centroids of each cluster as columns of a d x n_clusters matrix.
template <typename Derived>
Points<double> cluster_centroids(const Eigen::MatrixBase<Derived>& points,
                                 const ClusterLabeling& labeling) {
  if (static_cast<Index>(labeling.labels.size()) != points.cols())
    throw std::invalid_argument("cluster_centroids: labeling does not cover points");
  Points<double> sums = Points<double>::Zero(points.rows(), labeling.n_clusters);
  std::vector<Index> counts(static_cast<std::size_t>(labeling.n_clusters), 0);
  for (Index i = 0; i < points.cols(); ++i) {
    const int l = labeling.labels[static_cast<std::size_t>(i)];
    if (l < 0) continue;
    sums.col(l) += points.col(i).template cast<double>();
    ++counts[static_cast<std::size_t>(l)];
  }
  for (int l = 0; l < labeling.n_clusters; ++l)
    sums.col(l) /= static_cast<double>(counts[static_cast<std::size_t>(l)]);
  return sums;
}

/// Unweighted mean, over clusters, of each cluster's mean squared distance to
/// its centroid. Noise is ignored; 0 when there are no clusters.
template <typename Derived>
double cluster_variance(const Eigen::MatrixBase<Derived>& points, const ClusterLabeling& labeling) {
  if (labeling.n_clusters == 0) return 0.0;
  const Points<double> centroids = cluster_centroids(points, labeling);
  std::vector<double> sq(static_cast<std::size_t>(labeling.n_clusters), 0.0);
  std::vector<Index> counts(static_cast<std::size_t>(labeling.n_clusters), 0);
  for (Index i = 0; i < points.cols(); ++i) {
    const int l = labeling.labels[static_cast<std::size_t>(i)];
    if (l < 0) continue;
    sq[static_cast<std::size_t>(l)] +=
        (points.col(i).template cast<double>() - centroids.col(l)).squaredNorm();
    ++counts[static_cast<std::size_t>(l)];
  }
  double total = 0.0;
  for (std::size_t l = 0; l < sq.size(); ++l) total += sq[l] / static_cast<double>(counts[l]);
  return total / static_cast<double>(labeling.n_clusters);
}

/// Mean and minimum Euclidean distance over all pairs of cluster centroids;
/// nullopt with fewer than two clusters.
template <typename Derived>
std::optional<InterClusterDistances> inter_cluster_distances(
    const Eigen::MatrixBase<Derived>& points, const ClusterLabeling& labeling) {
  if (labeling.n_clusters < 2) return std::nullopt;
  const Points<double> centroids = cluster_centroids(points, labeling);
  double sum = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  Index pairs = 0;
  for (Index a = 0; a < centroids.cols(); ++a)
    for (Index b = a + 1; b < centroids.cols(); ++b) {
      const double d = (centroids.col(a) - centroids.col(b)).norm();
      sum += d;
      lo = std::min(lo, d);
      ++pairs;
    }
  return InterClusterDistances{sum / static_cast<double>(pairs), lo};
}

/// Sum of Euclidean distances over all unordered pairs of points.
template <typename Derived>
double pairwise_spread(const Eigen::MatrixBase<Derived>& points) {
  const Index n = points.cols();
  double total = 0.0;
  for (Index i = 0; i + 1 < n; ++i) {
    const auto rest = points.rightCols(n - i - 1);
    total += static_cast<double>((rest.colwise() - points.col(i)).colwise().norm().sum());
  }
  return total;
}

/// DBSCAN plus every polarization metric, in one pass over a snapshot.
template <typename Derived>
MetricsRecord compute_metrics(const Eigen::MatrixBase<Derived>& points, Iteration iteration,
                              Index pool_size, double eps, int min_pts) {
  const ClusterLabeling labeling = dbscan(points, eps, min_pts);
  MetricsRecord rec;
  rec.iteration = iteration;
  rec.n_clusters = labeling.n_clusters;
  rec.avg_cluster_variance = cluster_variance(points, labeling);
  if (auto d = inter_cluster_distances(points, labeling)) {
    rec.avg_inter_cluster_dist = d->avg;
    rec.min_inter_cluster_dist = d->min;
  }
  rec.pairwise_spread = pairwise_spread(points);
  rec.pool_size = pool_size;
  return rec;
}

}  // namespace recsim
