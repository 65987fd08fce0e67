#include "nilm/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nilm/error.hpp"

namespace nilm {

namespace {

template <typename T>
Scaler fit_scaler_impl(std::span<const T> values) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (T v : values) {
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, static_cast<double>(v));
    hi = std::max(hi, static_cast<double>(v));
  }
  if (!(hi > lo)) throw DataError("fit_scaler: need at least two distinct values");
  return {lo, hi};
}

}  // namespace

Scaler fit_scaler(std::span<const float> values) { return fit_scaler_impl(values); }
Scaler fit_scaler(std::span<const double> values) { return fit_scaler_impl(values); }

double scale(double x, const Scaler& s, Direction direction) {
  const double range = s.x_max - s.x_min;
  if (direction == Direction::inverse) return x * range + s.x_min;
  return (std::clamp(x, s.x_min, s.x_max) - s.x_min) / range;
}

std::size_t scale_in_place(std::span<float> values, const Scaler& s) {
  std::size_t clamped = 0;
  for (float& v : values) {
    if (v < s.x_min || v > s.x_max) ++clamped;
    v = static_cast<float>(scale(v, s, Direction::forward));
  }
  return clamped;
}

nn::Tensor<float> WindowSet::batch(std::span<const Index> rows) const {
  const auto n = static_cast<Index>(rows.size());
  nn::Tensor<float> t(window_len, 1, n);
  for (Index b = 0; b < n; ++b)
    for (Index k = 0; k < window_len; ++k) t[k](0, b) = windows(rows[static_cast<std::size_t>(b)], k);
  return t;
}

nn::Tensor<float> WindowSet::batch(Index first, Index count) const {
  nn::Tensor<float> t;
  t.steps.reserve(static_cast<std::size_t>(window_len));
  for (Index k = 0; k < window_len; ++k) t.steps.push_back(windows.col(k).segment(first, count).transpose());
  return t;
}

void WindowSet::append(const WindowSet& other) {
  if (other.size() == 0) return;
  if (size() == 0) {
    *this = other;
    return;
  }
  if (other.window_len != window_len) throw DataError("WindowSet::append: window length mismatch");
  MatrixXf merged(size() + other.size(), window_len);
  merged << windows, other.windows;
  windows = std::move(merged);
  labels.insert(labels.end(), other.labels.begin(), other.labels.end());
}

WindowSet make_windows(std::span<const float> sequence, std::span<const std::uint8_t> states, Index window) {
  if (window < 1) throw DataError("make_windows: window must be positive");
  if (!states.empty() && states.size() != sequence.size())
    throw DataError("make_windows: " + std::to_string(sequence.size()) + " samples but " +
                    std::to_string(states.size()) + " states");
  const auto n = static_cast<Index>(sequence.size());
  const Index front = window / 2;
  WindowSet ws;
  ws.window_len = window;
  ws.label_offset = front;
  ws.windows = MatrixXf::Zero(n, window);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < window; ++k) {
      const Index src = i + k - front;
      if (src >= 0 && src < n) ws.windows(i, k) = sequence[static_cast<std::size_t>(src)];
    }
  ws.labels.assign(states.begin(), states.end());
  return ws;
}

std::vector<std::uint32_t> run_length_index(std::span<const std::uint8_t> states) {
  std::vector<std::uint32_t> out(states.size(), 0);
  std::uint32_t run = 0;
  for (std::size_t t = 0; t < states.size(); ++t) {
    run = states[t] ? run + 1 : 0;
    out[t] = run;
  }
  return out;
}

nn::Tensor<float> RegressorSamples::batch(std::span<const Index> rows) const {
  const auto n = static_cast<Index>(rows.size());
  nn::Tensor<float> t(lookback, 1, n);
  for (Index b = 0; b < n; ++b)
    for (Index k = 0; k < lookback; ++k) t[k](0, b) = inputs(rows[static_cast<std::size_t>(b)], k);
  return t;
}

void lookback_row(std::span<const std::uint32_t> indices, std::size_t t, double index_scale,
                  Eigen::Ref<Eigen::RowVectorXf, 0, Eigen::InnerStride<>> row) {
  const Index lookback = row.size();
  for (Index k = 0; k < lookback; ++k) {
    const auto back = static_cast<std::size_t>(lookback - k);
    row(k) = t >= back ? static_cast<float>(indices[t - back] / index_scale) : 0.0f;
  }
}

RegressorSamples make_regressor_samples(std::span<const std::uint32_t> indices, std::span<const float> powers,
                                        const Scaler& power_scaler, double index_scale) {
  if (indices.size() != powers.size()) throw DataError("make_regressor_samples: length mismatch");
  if (!(index_scale > 0)) throw DataError("make_regressor_samples: index_scale must be positive");
  RegressorSamples s;
  for (std::size_t t = 0; t < indices.size(); ++t)
    if (indices[t] > 0) s.positions.push_back(t);
  const auto n = static_cast<Index>(s.positions.size());
  s.inputs.resize(n, s.lookback);
  s.targets.resize(n);
  for (Index r = 0; r < n; ++r) {
    const std::size_t t = s.positions[static_cast<std::size_t>(r)];
    lookback_row(indices, t, index_scale, s.inputs.row(r));
    s.targets(r) = static_cast<float>(scale(powers[t], power_scaler, Direction::forward));
  }
  return s;
}

}  // namespace nilm
