#pragma once

#include <Eigen/Core>

namespace lipfuse {

/// Dense row-major matrix; rows are samples (or probes).
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace lipfuse
