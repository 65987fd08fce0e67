#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nilm/eigen_types.hpp"
#include "nilm/nn/tensor.hpp"

namespace nilm {

/// MinMax scaler: x -> (x - x_min) / (x_max - x_min).
struct Scaler {
  double x_min = 0.0;
  double x_max = 1.0;
  friend bool operator==(const Scaler&, const Scaler&) = default;
};

enum class Direction { forward, inverse };

/// Throws DataError when the values hold fewer than two distinct finite numbers.
Scaler fit_scaler(std::span<const float> values);
Scaler fit_scaler(std::span<const double> values);

/// Forward clamps to [x_min, x_max] first.
double scale(double x, const Scaler& s, Direction direction);

/// Forward-scales every value; returns how many were clamped.
std::size_t scale_in_place(std::span<float> values, const Scaler& s);

/// Seq2point training/inference windows.
///
/// Row i of `windows` is the zero-padded input around original sample i,
/// which sits at column `label_offset` = floor(W/2).
struct WindowSet {
  MatrixXf windows;  // n x W
  std::vector<std::uint8_t> labels;
  Index window_len = 0;
  Index label_offset = 0;

  Index size() const { return windows.rows(); }

  /// Rows `rows` as a classifier input batch (W steps of 1 x batch).
  nn::Tensor<float> batch(std::span<const Index> rows) const;
  nn::Tensor<float> batch(Index first, Index count) const;

  /// Appends the windows of `other` (same W).
  void append(const WindowSet& other);
};

/// Pads floor(W/2) zeros in front and ceil(W/2) behind, then emits exactly
/// one window per input sample. `states` may be empty (inference).
WindowSet make_windows(std::span<const float> sequence, std::span<const std::uint8_t> states, Index window);

/// index[t] = 0 when off, index[t-1] + 1 when on.
std::vector<std::uint32_t> run_length_index(std::span<const std::uint8_t> states);

inline constexpr Index kRegressorLookback = 5;

/// LSTM regression samples over active time steps.
struct RegressorSamples {
  MatrixXf inputs;   // n x lookback, scaled indices
  VectorXf targets;  // n, scaled power
  std::vector<std::size_t> positions;  // source time step of each row
  Index lookback = kRegressorLookback;

  Index size() const { return inputs.rows(); }
  nn::Tensor<float> batch(std::span<const Index> rows) const;
};

/// Lookback row for step t: indices[t-5 .. t-1] (zero where t-k < 0) / index_scale.
void lookback_row(std::span<const std::uint32_t> indices, std::size_t t, double index_scale,
                  Eigen::Ref<Eigen::RowVectorXf, 0, Eigen::InnerStride<>> row);

/// One sample per step with indices[t] > 0.
RegressorSamples make_regressor_samples(std::span<const std::uint32_t> indices, std::span<const float> powers,
                                        const Scaler& power_scaler, double index_scale);

}  // namespace nilm
