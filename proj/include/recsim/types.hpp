#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace recsim {

// Point sets are stored column-wise: a d x n matrix holds n points in R^d.
template <typename Scalar>
using Points = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using PointsXd = Points<double>;
using VectorXd = Vector<double>;

using Index = Eigen::Index;
using UserId = std::int64_t;
using ContentId = std::int64_t;
using Iteration = std::int64_t;

}  // namespace recsim
