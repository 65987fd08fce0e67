#pragma once

#include <algorithm>
#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/float128.hpp>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "nilm/nn/network.hpp"
#include "nilm/rng.hpp"

namespace nilm::nn {

struct GradientCheckResult {
  double max_relative_error = 0.0;
  std::size_t coordinates = 0;
  /// Coordinates passed over because a ReLU or max-pool branch flips inside
  /// the difference stencil, where the central difference is not a derivative.
  std::size_t skipped_at_kinks = 0;
  /// Coordinates whose difference was recomputed in 128-bit arithmetic.
  std::size_t refined = 0;
};

namespace detail {

template <typename Wide>
double central_difference(Network<Wide>& net, const Tensor<Wide>& x, const Matrix<Wide>& y, LossKind kind,
                          std::size_t layer, std::size_t param, Index index, double h) {
  Wide& w = net.layer(layer).parameters()[param].value.data()[index];
  const Wide saved = w;
  w = saved + Wide(h);
  const Wide up = evaluate_loss(net, x, y, kind);
  w = saved - Wide(h);
  const Wide down = evaluate_loss(net, x, y, kind);
  w = saved;
  return static_cast<double>((up - down) / (Wide(2) * Wide(h)));
}

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-12});
}

}  // namespace detail

/// Compares analytic gradients against central differences on `samples`
/// randomly drawn parameter coordinates (all of them when fewer exist).
/// Differences are taken in long double; a coordinate that disagrees by more
/// than 1e-8 is re-evaluated in 128-bit floating point, since tiny gradients
/// drown in the roundoff of the loss otherwise.
///
/// relative error = |analytic - numeric| / max(|analytic|, |numeric|, 1e-12)
inline GradientCheckResult gradient_check(Network<double> net, const Tensor<double>& input,
                                          const MatrixXd& target, LossKind kind, std::size_t samples = 200,
                                          std::uint64_t seed = 0, double h = 1e-5) {
  const auto analytic = backward(net, input, target, kind).grads;

  struct Coord {
    std::size_t layer, param;
    Index index;
  };
  std::vector<Coord> all;
  for (std::size_t i = 0; i < net.size(); ++i) {
    auto params = net.layer(i).parameters();
    for (std::size_t k = 0; k < params.size(); ++k)
      for (Index j = 0; j < params[k].size(); ++j) all.push_back({i, k, j});
  }
  Rng rng(seed);
  rng.shuffle(all);

  using Wide = long double;
  using Quad = boost::multiprecision::float128;
  auto wide = net.template cast<Wide>();
  const auto wide_input = input.template cast<Wide>();
  const Matrix<Wide> wide_target = target.template cast<Wide>();
  std::optional<Network<Quad>> quad;
  const auto quad_input = input.template cast<Quad>();
  const Matrix<Quad> quad_target = target.template cast<Quad>();
  const bool logits = kind == LossKind::cross_entropy;
  const auto base_pattern = wide.activation_pattern(wide_input, logits);

  GradientCheckResult result;
  for (const auto& c : all) {
    if (result.coordinates == samples) break;
    Wide& w = wide.layer(c.layer).parameters()[c.param].value.data()[c.index];
    const Wide saved = w;
    bool kink = false;
    for (const Wide shifted : {saved + static_cast<Wide>(h), saved - static_cast<Wide>(h)}) {
      w = shifted;
      kink = kink || wide.activation_pattern(wide_input, logits) != base_pattern;
    }
    w = saved;
    if (kink) {
      ++result.skipped_at_kinks;
      continue;
    }
    const double a = analytic[c.layer][c.param].data()[c.index];
    double numeric = detail::central_difference(wide, wide_input, wide_target, kind, c.layer, c.param, c.index, h);
    if (detail::relative_error(a, numeric) > 1e-8) {
      if (!quad) quad = net.template cast<Quad>();
      numeric = detail::central_difference(*quad, quad_input, quad_target, kind, c.layer, c.param, c.index, h);
      ++result.refined;
    }
    result.max_relative_error = std::max(result.max_relative_error, detail::relative_error(a, numeric));
    ++result.coordinates;
  }
  return result;
}

}  // namespace nilm::nn
