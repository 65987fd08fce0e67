#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nilm/eigen_types.hpp"

namespace nilm::nn {

/// A batch of sequences: `steps[t]` is a (features x batch) matrix.
///
/// Conv/pool layers read steps as spatial positions, LSTM layers as time.
/// A flat feature vector is a length-1 tensor.
template <typename Scalar>
struct Tensor {
  std::vector<Matrix<Scalar>> steps;

  Tensor() = default;
  explicit Tensor(std::vector<Matrix<Scalar>> s) : steps(std::move(s)) {}
  Tensor(Index length, Index features, Index batch)
      : steps(static_cast<std::size_t>(length), Matrix<Scalar>::Zero(features, batch)) {}

  Index length() const { return static_cast<Index>(steps.size()); }
  Index features() const { return steps.empty() ? 0 : steps.front().rows(); }
  Index batch() const { return steps.empty() ? 0 : steps.front().cols(); }

  Matrix<Scalar>& operator[](Index t) { return steps[static_cast<std::size_t>(t)]; }
  const Matrix<Scalar>& operator[](Index t) const { return steps[static_cast<std::size_t>(t)]; }

  template <typename To>
  Tensor<To> cast() const {
    Tensor<To> out;
    out.steps.reserve(steps.size());
    for (const auto& s : steps) out.steps.push_back(s.template cast<To>());
    return out;
  }

  /// Columns [first, first+count) of every step.
  Tensor slice_batch(Index first, Index count) const {
    Tensor out;
    out.steps.reserve(steps.size());
    for (const auto& s : steps) out.steps.push_back(s.middleCols(first, count));
    return out;
  }
};

/// Per-sample shape of a tensor: sequence length x features.
struct Shape {
  Index length = 0;
  Index features = 0;
  friend bool operator==(const Shape&, const Shape&) = default;
};

/// A trainable tensor. `value` holds the data as a matrix; `shape` is the
/// logical shape whose row-major flattening equals `value` in row-major order.
template <typename Scalar>
struct Parameter {
  std::string name;
  std::vector<std::uint32_t> shape;
  Matrix<Scalar> value;

  Index size() const { return value.size(); }
};

/// Gradients for one network: `grads[layer][param]`, shaped like the parameters.
template <typename Scalar>
using Gradients = std::vector<std::vector<Matrix<Scalar>>>;

}  // namespace nilm::nn
