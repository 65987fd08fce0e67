#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "nilm/error.hpp"
#include "nilm/features.hpp"
#include "nilm/nn/network.hpp"
#include "nilm/rng.hpp"
#include "nilm/signature.hpp"

namespace nilm {

inline constexpr Index kDefaultWindow = 20;
inline constexpr Index kLookback = kRegressorLookback;
inline constexpr Index kLstmUnits = 50;
inline constexpr Index kRegressorParams = 30651;
inline constexpr Index kClassifierParamLimit = 40000;
inline constexpr Index kBundleParamLimit = 70000;

namespace detail {

/// Uniform(-sqrt(6/fan_in), +sqrt(6/fan_in)) weights, zero bias.
template <typename Scalar>
void init_fan_in(nn::Layer<Scalar>& layer, Index fan_in, Rng& rng) {
  auto params = layer.parameters();
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
  auto& w = params[0].value;
  for (Index i = 0; i < w.size(); ++i) w.data()[i] = static_cast<Scalar>(rng.uniform(-limit, limit));
  params[1].value.setZero();
}

/// Uniform(+-1/sqrt(units)) for both kernels, zero bias except forget gate = 1.
template <typename Scalar>
void init_lstm(nn::LSTM<Scalar>& layer, Rng& rng) {
  auto params = layer.parameters();
  const Index u = layer.units();
  const double limit = 1.0 / std::sqrt(static_cast<double>(u));
  for (int k = 0; k < 2; ++k) {
    auto& w = params[static_cast<std::size_t>(k)].value;
    for (Index i = 0; i < w.size(); ++i) w.data()[i] = static_cast<Scalar>(rng.uniform(-limit, limit));
  }
  params[2].value.setZero();
  params[2].value.middleRows(u, u).setConstant(Scalar(1));
}

}  // namespace detail

/// 1-D CNN on-state classifier over a mains window of length `window`:
///
///   conv1d(16, k=3) relu maxpool(2) conv1d(32, k=3) relu maxpool(2)
///   flatten dense(64) relu dense(2) softmax
template <typename Scalar = float>
nn::Network<Scalar> build_classifier(Index window = kDefaultWindow, std::uint64_t seed = 0) {
  if (window < 10) throw ShapeError("classifier window must be >= 10, got " + std::to_string(window));
  Rng rng(seed);
  nn::Network<Scalar> net(nn::Shape{window, 1});
  net.template emplace<nn::Conv1D<Scalar>>(1, 16, 3);
  detail::init_fan_in(net.layer(net.size() - 1), 3, rng);
  net.template emplace<nn::ReLU<Scalar>>();
  net.template emplace<nn::MaxPool1D<Scalar>>(2);
  net.template emplace<nn::Conv1D<Scalar>>(16, 32, 3);
  detail::init_fan_in(net.layer(net.size() - 1), 16 * 3, rng);
  net.template emplace<nn::ReLU<Scalar>>();
  net.template emplace<nn::MaxPool1D<Scalar>>(2);
  net.template emplace<nn::Flatten<Scalar>>();
  const Index flat = net.output_shape().features;
  net.template emplace<nn::Dense<Scalar>>(flat, 64);
  detail::init_fan_in(net.layer(net.size() - 1), flat, rng);
  net.template emplace<nn::ReLU<Scalar>>();
  net.template emplace<nn::Dense<Scalar>>(64, 2);
  detail::init_fan_in(net.layer(net.size() - 1), 64, rng);
  net.template emplace<nn::Softmax<Scalar>>();
  if (net.param_count() > kClassifierParamLimit)
    throw ShapeError("classifier exceeds parameter budget: " + std::to_string(net.param_count()));
  return net;
}

/// Stacked-LSTM power regressor: lstm(50, sequences) lstm(50) dense(1) over
/// `kLookback` scalar steps. `zero_init` leaves every parameter at zero.
template <typename Scalar = float>
nn::Network<Scalar> build_regressor(std::uint64_t seed = 0, bool zero_init = false,
                                    nn::CellActivation activation = nn::CellActivation::relu) {
  Rng rng(seed);
  nn::Network<Scalar> net(nn::Shape{kLookback, 1});
  auto first = std::make_unique<nn::LSTM<Scalar>>(1, kLstmUnits, true, activation);
  auto second = std::make_unique<nn::LSTM<Scalar>>(kLstmUnits, kLstmUnits, false, activation);
  auto head = std::make_unique<nn::Dense<Scalar>>(kLstmUnits, 1);
  if (!zero_init) {
    detail::init_lstm(*first, rng);
    detail::init_lstm(*second, rng);
    detail::init_fan_in(*head, kLstmUnits, rng);
  }
  net.add(std::move(first));
  net.add(std::move(second));
  net.add(std::move(head));
  return net;
}

template <typename Scalar>
Index param_count(const nn::Network<Scalar>& net) {
  return net.param_count();
}

/// Everything needed to disaggregate one appliance from mains.
struct ModelBundle {
  std::string appliance;
  nn::Network<float> classifier;
  nn::Network<float> regressor;
  Scaler mains_scaler;
  Scaler power_scaler;
  double index_scale = 1.0;
  ApplianceParams params;
  OffStats off;
  std::int64_t period = 60;

  Index window() const { return classifier.empty() ? 0 : classifier.input_shape().length; }
  Index param_count() const { return classifier.param_count() + regressor.param_count(); }
};

/// Throws ShapeError when the pair exceeds kBundleParamLimit.
inline void check_param_budget(const ModelBundle& b) {
  if (b.param_count() > kBundleParamLimit)
    throw ShapeError("bundle '" + b.appliance + "' has " + std::to_string(b.param_count()) +
                     " parameters, budget is " + std::to_string(kBundleParamLimit));
}

}  // namespace nilm
