#include "recsim/theory.hpp"

#include "recsim/dynamics.hpp"
#include "recsim/metrics.hpp"
#include "recsim/model.hpp"
#include "recsim/recommend.hpp"
#include "recsim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace recsim::theory {

void SimplifiedParams::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
  if (creator_positions.empty()) fail("creator_positions: need at least one creator");
  for (std::size_t j = 1; j < creator_positions.size(); ++j)
    if (!(creator_positions[j - 1] < creator_positions[j]))
      fail("creator_positions: must be strictly increasing");
  if (n_users < 1) fail("n_users: must be positive");
  if (!(rho > 0.05 && rho < 0.5)) fail("rho: must lie strictly inside (0.05, 0.5)");
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail("alpha: must lie in [0, 1]");
  if (n_iterations < 0) fail("n_iterations: must be non-negative");
  if (!(noise_sigma >= 0.0)) fail("noise_sigma: must be >= 0");
  if (!(decay_lambda > 0.0)) fail("decay_lambda: must be > 0");
  if (!(prune_threshold > 0.0 && prune_threshold < 1.0))
    fail("prune_threshold: must lie in (0, 1)");
  if (!(init_sigma >= 0.0)) fail("init_sigma: must be >= 0");
}

Index fixed_fraction_k(Index n_items, double rho) {
  if (n_items < 1) throw std::invalid_argument("fixed_fraction_k: empty pool");
  const double n = static_cast<double>(n_items);
  const auto k = static_cast<Index>(std::ceil(rho * n - 1e-9 * std::max(1.0, n)));
  return std::clamp<Index>(k, 1, n_items);
}

double spread_1d(std::span<const double> positions) {
  // Sum over pairs of |x_i - x_j| equals sum_i (2i - n + 1) x_(i) on sorted values.
  std::vector<double> sorted(positions.begin(), positions.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double total = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i)
    total += (2.0 * static_cast<double>(i) - n + 1.0) * sorted[i];
  return total;
}

namespace {

// In one dimension the k nearest items form a window around the user in
// value order, so each step sorts the pool once and every user grows its
// window outward. Items equally far away are taken in id order, the same
// rule as k_nearest_columns. The median is the lower weighted median.
class Mover {
 public:
  void reset(const ContentPool& pool, std::span<const double> weights, Index k) {
    const auto values = pool.positions();
    const auto& ids = pool.ids();
    k_ = k;
    order_.resize(static_cast<std::size_t>(pool.size()));
    std::iota(order_.begin(), order_.end(), Index{0});
    std::sort(order_.begin(), order_.end(), [&](Index a, Index b) {
      if (values(0, a) != values(0, b)) return values(0, a) < values(0, b);
      return ids[static_cast<std::size_t>(a)] < ids[static_cast<std::size_t>(b)];
    });
    items_.clear();
    groups_.clear();
    for (std::size_t s = 0; s < order_.size(); ++s) {
      const Index slot = order_[s];
      const double v = values(0, slot);
      if (groups_.empty() || groups_.back().value != v) groups_.push_back({v, s, s});
      ++groups_.back().end;
      items_.push_back({ids[static_cast<std::size_t>(slot)], v, weights[static_cast<std::size_t>(slot)]});
    }
  }

  double target(double x) {
    const auto g = static_cast<std::ptrdiff_t>(groups_.size());
    std::ptrdiff_t r = std::upper_bound(groups_.begin(), groups_.end(), x,
                                        [](double v, const Group& grp) { return v < grp.value; }) -
                       groups_.begin();
    std::ptrdiff_t l = r - 1;
    auto dist2 = [&](std::ptrdiff_t i) {
      if (i < 0 || i >= g) return std::numeric_limits<double>::infinity();
      const double d = groups_[static_cast<std::size_t>(i)].value - x;
      return d * d;
    };

    left_.clear();
    right_.clear();
    Index remaining = k_;
    while (remaining > 0) {
      const double d = std::min(dist2(l), dist2(r));
      batch_.clear();
      std::size_t batch_size = 0;
      for (; dist2(l) == d; --l) {
        batch_.push_back({l, true});
        batch_size += groups_[static_cast<std::size_t>(l)].size();
      }
      for (; dist2(r) == d; ++r) {
        batch_.push_back({r, false});
        batch_size += groups_[static_cast<std::size_t>(r)].size();
      }
      if (batch_size <= static_cast<std::size_t>(remaining)) {
        for (const auto& [gi, left] : batch_) {
          const auto& grp = groups_[static_cast<std::size_t>(gi)];
          for (std::size_t s = grp.begin; s < grp.end; ++s) (left ? left_ : right_).push_back(s);
        }
        remaining -= static_cast<Index>(batch_size);
        continue;
      }
      // Equal distances straddle the cut: take the smallest ids. A lone
      // group is already in id order.
      if (batch_.size() == 1) {
        const auto& [gi, left] = batch_.front();
        const auto& grp = groups_[static_cast<std::size_t>(gi)];
        for (std::size_t s = grp.begin; s < grp.begin + static_cast<std::size_t>(remaining); ++s)
          (left ? left_ : right_).push_back(s);
        break;
      }
      tied_.clear();
      for (const auto& [gi, left] : batch_) {
        const auto& grp = groups_[static_cast<std::size_t>(gi)];
        for (std::size_t s = grp.begin; s < grp.end; ++s) tied_.push_back({s, left});
      }
      const auto cut = tied_.begin() + remaining;
      std::partial_sort(tied_.begin(), cut, tied_.end(), [this](const auto& a, const auto& b) {
        return items_[a.first].id < items_[b.first].id;
      });
      // Keep each side ordered outward: decreasing slot on the left, increasing on the right.
      std::sort(tied_.begin(), cut, [](const auto& a, const auto& b) {
        return a.second == b.second ? (a.second ? a.first > b.first : a.first < b.first) : a.second;
      });
      for (auto it = tied_.begin(); it != cut; ++it) (it->second ? left_ : right_).push_back(it->first);
      remaining = 0;
    }

    double total = 0.0;
    for (std::size_t s : left_) total += items_[s].weight;
    for (std::size_t s : right_) total += items_[s].weight;
    const double half = total / 2;
    double cum = 0.0;
    for (auto it = left_.rbegin(); it != left_.rend(); ++it) {
      cum += items_[*it].weight;
      if (cum >= half) return items_[*it].value;
    }
    for (std::size_t s : right_) {
      cum += items_[s].weight;
      if (cum >= half) return items_[s].value;
    }
    return right_.empty() ? items_[left_.front()].value : items_[right_.back()].value;
  }

 private:
  struct Item {
    ContentId id;
    double value;
    double weight;
  };
  struct Group {
    double value;
    std::size_t begin, end;  // range in items_, ids ascending
    std::size_t size() const { return end - begin; }
  };
  Index k_ = 0;
  std::vector<Index> order_;
  std::vector<Item> items_;
  std::vector<Group> groups_;
  // Positions in items_: left_ runs outward (decreasing value), right_ outward (increasing).
  std::vector<std::size_t> left_, right_;
  std::vector<std::pair<std::ptrdiff_t, bool>> batch_;
  std::vector<std::pair<std::size_t, bool>> tied_;
};

}  // namespace

SimplifiedRun run_simplified(const SimplifiedParams& params) {
  params.validate();
  const RngPolicy rng(params.master_seed);
  const Index n = params.n_users;
  const Index steps = params.n_iterations;

  SimplifiedRun out;
  out.trajectory.resize(n, steps + 1);
  out.spread_history.reserve(static_cast<std::size_t>(steps + 1));

  auto init = rng.stream(Purpose::kTheoryInit, 0, 0);
  std::normal_distribution<double> gauss(params.init_mu, params.init_sigma);
  for (Index i = 0; i < n; ++i)
    out.trajectory(i, 0) = params.init_sigma > 0.0 ? gauss(init) : params.init_mu;
  out.spread_history.push_back(spread_1d({out.trajectory.col(0).data(), static_cast<std::size_t>(n)}));

  ContentPool pool(1);
  const auto m = static_cast<Index>(params.creator_positions.size());
  Mover mover;
  for (Iteration t = 0; t < steps; ++t) {
    for (Index j = 0; j < m; ++j)
      pool.append(j, Eigen::Matrix<double, 1, 1>(params.creator_positions[static_cast<std::size_t>(j)]), t);
    pool.prune(t, params.decay_lambda, params.prune_threshold);
    const auto weights = pool_weights(pool, t, params.decay_lambda);
    mover.reset(pool, weights, fixed_fraction_k(pool.size(), params.rho));

    const auto now = out.trajectory.col(t);
    auto next = out.trajectory.col(t + 1);
    for (Index i = 0; i < n; ++i) {
      const double x = now(i);
      double moved = x + params.alpha * (mover.target(x) - x);
      if (params.noise_sigma > 0.0) {
        auto noise = rng.stream(Purpose::kNoise, static_cast<std::uint64_t>(t),
                                static_cast<std::uint64_t>(i));
        moved += std::normal_distribution<double>(0.0, params.noise_sigma)(noise);
      }
      next(i) = moved;
    }
    out.spread_history.push_back(spread_1d({next.data(), static_cast<std::size_t>(n)}));
  }
  return out;
}

std::vector<double> gap_cluster_centroids(std::span<const double> positions, double gap) {
  std::vector<double> sorted(positions.begin(), positions.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> centroids;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= sorted.size(); ++i) {
    if (i == sorted.size() || sorted[i] - sorted[i - 1] > gap) {
      double sum = 0.0;
      for (std::size_t j = start; j < i; ++j) sum += sorted[j];
      centroids.push_back(sum / static_cast<double>(i - start));
      start = i;
    }
  }
  return centroids;
}

TheoremVerdict check_theorem(std::span<const double> final_positions,
                             std::span<const double> creator_positions, double cluster_tolerance,
                             double centroid_tolerance) {
  if (centroid_tolerance < 0.0) centroid_tolerance = cluster_tolerance;
  TheoremVerdict v;
  v.centroids = gap_cluster_centroids(final_positions, cluster_tolerance);
  v.n_clusters = static_cast<int>(v.centroids.size());
  v.count_within_bound = v.centroids.size() <= creator_positions.size();
  v.centroids_near_creators = std::all_of(v.centroids.begin(), v.centroids.end(), [&](double c) {
    return std::any_of(creator_positions.begin(), creator_positions.end(),
                       [&](double p) { return std::abs(c - p) <= centroid_tolerance; });
  });
  v.passed = v.count_within_bound && v.centroids_near_creators;
  return v;
}

ContractionVerdict check_spread_contraction(std::span<const double> spread_history, Index window) {
  if (window < 1) throw std::invalid_argument("check_spread_contraction: window must be >= 1");
  const auto n = static_cast<Index>(spread_history.size());
  auto mean = [&](Index from) {
    double s = 0.0;
    for (Index t = from; t < from + window; ++t) s += spread_history[static_cast<std::size_t>(t)];
    return s / static_cast<double>(window);
  };
  for (Index t = 0; t + 2 * window <= n; ++t) {
    const double earlier = mean(t);
    const double later = mean(t + window);
    const double slack = 64 * std::numeric_limits<double>::epsilon() * std::abs(earlier);
    if (later > earlier + slack) return {false, t};
  }
  return {true, std::nullopt};
}

bool check_boundedness(const Eigen::MatrixXd& trajectory, std::span<const double> creator_positions,
                       std::span<const double> initial_positions) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double x : creator_positions) lo = std::min(lo, x), hi = std::max(hi, x);
  for (double x : initial_positions) lo = std::min(lo, x), hi = std::max(hi, x);
  if (trajectory.size() == 0) return true;
  const double slack =
      4 * std::numeric_limits<double>::epsilon() * std::max({1.0, std::abs(lo), std::abs(hi)});
  return trajectory.minCoeff() >= lo - slack && trajectory.maxCoeff() <= hi + slack;
}

CheckReport run_checks(const SimplifiedParams& params, const CheckOptions& options) {
  const SimplifiedRun run = run_simplified(params);
  const Eigen::VectorXd initial = run.initial_positions();
  const Eigen::VectorXd final_pos = run.final_positions();
  const std::span<const double> creators(params.creator_positions);

  CheckReport report;
  report.theorem = check_theorem(std::span(final_pos.data(), static_cast<std::size_t>(final_pos.size())),
                                 creators, options.cluster_tolerance, options.centroid_tolerance);
  report.windowed = check_spread_contraction(run.spread_history, options.contraction_window);
  const double first = run.spread_history.front();
  const double last = run.spread_history.back();
  report.spread_ratio = first > 0.0 ? last / first : (last > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  report.contraction = report.windowed.passed && report.spread_ratio < options.contraction_ratio;
  if (params.noise_sigma == 0.0)
    report.boundedness = check_boundedness(
        run.trajectory, creators,
        std::span(initial.data(), static_cast<std::size_t>(initial.size())));
  return report;
}

}  // namespace recsim::theory
