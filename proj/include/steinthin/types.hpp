#pragma once

#include <cmath>

#include <Eigen/Core>

namespace steinthin {

/// n x d point storage, one point per row.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstVec = Eigen::Ref<const Eigen::VectorXd>;

inline constexpr const char* kVersion = STEINTHIN_VERSION;

}  // namespace steinthin
