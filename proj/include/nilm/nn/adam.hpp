#pragma once

#include <cmath>
#include <cstdint>

#include "nilm/error.hpp"
#include "nilm/nn/network.hpp"

namespace nilm::nn {

struct AdamConfig {
  double step_size = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
};

/// First/second moment accumulators, shaped like the network's parameters.
template <typename Scalar>
struct AdamState {
  AdamConfig config;
  Gradients<Scalar> m;
  Gradients<Scalar> v;
  std::uint64_t step = 0;

  AdamState() = default;
  AdamState(const Network<Scalar>& net, AdamConfig cfg)
      : config(cfg), m(net.zero_gradients()), v(net.zero_gradients()) {}
};

/// One bias-corrected adaptive-moment update. Throws TrainingError on a
/// non-finite gradient, leaving parameters untouched.
template <typename Scalar>
void adam_step(Network<Scalar>& net, const Gradients<Scalar>& grads, AdamState<Scalar>& state) {
  if (grads.size() != net.size() || state.m.size() != net.size())
    throw ShapeError("adam: gradient layout does not match network");
  for (std::size_t i = 0; i < grads.size(); ++i)
    for (std::size_t k = 0; k < grads[i].size(); ++k)
      if (!grads[i][k].allFinite())
        throw TrainingError("non-finite gradient in layer " + std::to_string(i) + " (" +
                            std::string(to_string(net.layer(i).kind())) + "), parameter " + std::to_string(k));

  ++state.step;
  const auto& c = state.config;
  const double t = static_cast<double>(state.step);
  const auto lr = static_cast<Scalar>(c.step_size);
  const auto b1 = static_cast<Scalar>(c.beta1);
  const auto b2 = static_cast<Scalar>(c.beta2);
  const auto eps = static_cast<Scalar>(c.epsilon);
  const auto corr1 = static_cast<Scalar>(1.0 - std::pow(c.beta1, t));
  const auto corr2 = static_cast<Scalar>(1.0 - std::pow(c.beta2, t));

  for (std::size_t i = 0; i < grads.size(); ++i) {
    auto params = net.layer(i).parameters();
    for (std::size_t k = 0; k < params.size(); ++k) {
      auto& m = state.m[i][k];
      auto& v = state.v[i][k];
      const auto& g = grads[i][k];
      m = b1 * m + (Scalar(1) - b1) * g;
      v = b2 * v + (Scalar(1) - b2) * g.cwiseProduct(g);
      params[k].value.array() -=
          lr * (m.array() / corr1) / ((v.array() / corr2).sqrt() + eps);
    }
  }
}

}  // namespace nilm::nn
