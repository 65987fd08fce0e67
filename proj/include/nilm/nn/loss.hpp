#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "nilm/eigen_types.hpp"
#include "nilm/error.hpp"

namespace nilm::nn {

enum class LossKind { cross_entropy, mean_squared_error };

/// Probability floor inside the cross-entropy logarithm.
inline constexpr double kProbabilityFloor = 1e-7;

template <typename Scalar>
struct LossValue {
  Scalar value;
  Matrix<Scalar> gradient;
};

/// Mean over all elements of (p - y)^2.
template <typename Scalar>
LossValue<Scalar> mean_squared_error(const Matrix<Scalar>& pred, const Matrix<Scalar>& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) throw ShapeError("mse: shape mismatch");
  const auto n = static_cast<Scalar>(pred.size());
  Matrix<Scalar> diff = pred - target;
  return {diff.squaredNorm() / n, (Scalar(2) / n) * diff};
}

/// Softmax cross-entropy on logits (classes x batch), averaged over the batch.
/// `target` is one-hot per column.
template <typename Scalar>
LossValue<Scalar> softmax_cross_entropy(const Matrix<Scalar>& logits, const Matrix<Scalar>& target) {
  if (logits.rows() != target.rows() || logits.cols() != target.cols())
    throw ShapeError("cross-entropy: shape mismatch");
  const auto batch = static_cast<Scalar>(logits.cols());
  Matrix<Scalar> p = (logits.rowwise() - logits.colwise().maxCoeff()).array().exp().matrix();
  p.array().rowwise() /= p.colwise().sum().array();
  using std::log;
  const auto floor = static_cast<Scalar>(kProbabilityFloor);
  Scalar total = 0;
  for (Index c = 0; c < p.cols(); ++c)
    for (Index r = 0; r < p.rows(); ++r)
      if (target(r, c) != Scalar(0)) total -= target(r, c) * log(p(r, c) < floor ? floor : Scalar(p(r, c)));
  return {total / batch, (p - target) / batch};
}

template <typename Scalar>
LossValue<Scalar> compute_loss(LossKind kind, const Matrix<Scalar>& out, const Matrix<Scalar>& target) {
  return kind == LossKind::cross_entropy ? softmax_cross_entropy(out, target) : mean_squared_error(out, target);
}

}  // namespace nilm::nn
