#pragma once

#include <Eigen/Dense>

namespace nilm {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using RowMajorMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using MatrixXf = Matrix<float>;
using MatrixXd = Matrix<double>;
using VectorXf = Vector<float>;
using VectorXd = Vector<double>;

using Index = Eigen::Index;

}  // namespace nilm
