#pragma once

#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

#include "nilm/error.hpp"
#include "nilm/nn/layers.hpp"
#include "nilm/nn/loss.hpp"

namespace nilm::nn {

/// Result of a training-mode forward pass.
template <typename Scalar>
struct ForwardTrace {
  std::vector<LayerCache<Scalar>> caches;
  /// Output of the last layer that was run. When a trailing softmax is skipped
  /// this holds the logits.
  Tensor<Scalar> output;
  std::size_t layers_run = 0;
};

/// A sequential stack of layers with a fixed per-sample input shape.
template <typename Scalar>
class Network {
 public:
  Network() = default;
  explicit Network(Shape input) : input_(input) {}

  Network(const Network& other) : input_(other.input_) {
    layers_.reserve(other.layers_.size());
    for (const auto& l : other.layers_) layers_.push_back(l->clone());
  }
  Network& operator=(const Network& other) {
    if (this != &other) {
      Network tmp(other);
      *this = std::move(tmp);
    }
    return *this;
  }
  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;

  /// Appends a layer after checking it composes with the current output shape.
  Network& add(std::unique_ptr<Layer<Scalar>> layer) {
    try {
      (void)layer->output_shape(output_shape());
    } catch (const ShapeError& e) {
      throw ShapeError(e.what(), static_cast<int>(layers_.size()));
    }
    layers_.push_back(std::move(layer));
    return *this;
  }

  template <typename L, typename... Args>
  Network& emplace(Args&&... args) {
    return add(std::make_unique<L>(std::forward<Args>(args)...));
  }

  Shape input_shape() const { return input_; }

  Shape output_shape() const {
    Shape s = input_;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      try {
        s = layers_[i]->output_shape(s);
      } catch (const ShapeError& e) {
        throw ShapeError(e.what(), static_cast<int>(i));
      }
    }
    return s;
  }

  std::size_t size() const { return layers_.size(); }
  bool empty() const { return layers_.empty(); }
  const Layer<Scalar>& layer(std::size_t i) const { return *layers_[i]; }
  Layer<Scalar>& layer(std::size_t i) { return *layers_[i]; }

  bool ends_with_softmax() const { return !layers_.empty() && layers_.back()->kind() == LayerKind::softmax; }

  Index param_count() const {
    Index n = 0;
    for (const auto& l : layers_)
      for (const auto& p : l->parameters()) n += p.size();
    return n;
  }

  /// Inference. Pure in (network, input).
  Tensor<Scalar> forward(const Tensor<Scalar>& x, bool stop_before_softmax = false) const {
    check_input(x);
    std::size_t n = layers_.size();
    if (stop_before_softmax && ends_with_softmax()) --n;
    Tensor<Scalar> h = x;
    for (std::size_t i = 0; i < n; ++i) h = layers_[i]->forward(h, nullptr);
    return h;
  }

  /// Training-mode forward; optionally stops before a trailing softmax.
  ForwardTrace<Scalar> forward_trace(const Tensor<Scalar>& x, bool stop_before_softmax) const {
    check_input(x);
    ForwardTrace<Scalar> trace;
    trace.layers_run = layers_.size();
    if (stop_before_softmax && ends_with_softmax()) --trace.layers_run;
    trace.caches.resize(trace.layers_run);
    Tensor<Scalar> h = x;
    for (std::size_t i = 0; i < trace.layers_run; ++i) h = layers_[i]->forward(h, &trace.caches[i]);
    trace.output = std::move(h);
    return trace;
  }

  /// Branches taken by every piecewise operation for input `x`; two inputs or
  /// parameter settings with equal patterns lie on the same smooth piece.
  std::vector<int> activation_pattern(const Tensor<Scalar>& x, bool stop_before_softmax = false) const {
    const auto trace = forward_trace(x, stop_before_softmax);
    std::vector<int> out;
    for (std::size_t i = 0; i < trace.layers_run; ++i) layers_[i]->activation_pattern(trace.caches[i], out);
    return out;
  }

  Gradients<Scalar> zero_gradients() const {
    Gradients<Scalar> g(layers_.size());
    for (std::size_t i = 0; i < layers_.size(); ++i)
      for (const auto& p : layers_[i]->parameters()) g[i].push_back(Matrix<Scalar>::Zero(p.value.rows(), p.value.cols()));
    return g;
  }

  /// Back-propagates `grad_output` (gradient w.r.t. trace.output) and returns
  /// parameter gradients.
  Gradients<Scalar> backward(const ForwardTrace<Scalar>& trace, const Tensor<Scalar>& grad_output) const {
    Gradients<Scalar> grads = zero_gradients();
    Tensor<Scalar> g = grad_output;
    for (std::size_t i = trace.layers_run; i-- > 0;)
      g = layers_[i]->backward(g, trace.caches[i], grads[i]);
    return grads;
  }

  template <typename To>
  Network<To> cast() const {
    Network<To> out(input_);
    for (const auto& l : layers_) {
      auto hp = l->hyperparameters();
      auto nl = make_layer<To>(l->kind(), hp);
      auto src = l->parameters();
      auto dst = nl->parameters();
      for (std::size_t k = 0; k < src.size(); ++k) dst[k].value = src[k].value.template cast<To>();
      out.add(std::move(nl));
    }
    return out;
  }

 private:
  void check_input(const Tensor<Scalar>& x) const {
    const Shape got{x.length(), x.features()};
    if (got != input_)
      throw ShapeError("input shape (" + std::to_string(got.length) + "x" + std::to_string(got.features) +
                           ") does not match network input (" + std::to_string(input_.length) + "x" +
                           std::to_string(input_.features) + ")",
                       0);
  }

  Shape input_;
  std::vector<std::unique_ptr<Layer<Scalar>>> layers_;
};

/// Loss plus parameter gradients for one minibatch.
template <typename Scalar>
struct LossAndGradients {
  Scalar loss{};
  Gradients<Scalar> grads;
};

/// Loss only, no caches.
template <typename Scalar>
Scalar evaluate_loss(const Network<Scalar>& net, const Tensor<Scalar>& input, const Matrix<Scalar>& target,
                     LossKind kind) {
  const auto out = net.forward(input, kind == LossKind::cross_entropy);
  if (out.length() != 1) throw ShapeError("loss expects a single-step network output");
  return compute_loss(kind, out[0], target).value;
}

/// For cross-entropy the network's trailing softmax is folded into the loss,
/// which then receives logits.
template <typename Scalar>
LossAndGradients<Scalar> backward(const Network<Scalar>& net, const Tensor<Scalar>& input,
                                  const Matrix<Scalar>& target, LossKind kind) {
  const bool logits = kind == LossKind::cross_entropy;
  auto trace = net.forward_trace(input, logits);
  if (trace.output.length() != 1) throw ShapeError("loss expects a single-step network output");
  auto [value, grad] = compute_loss(kind, trace.output[0], target);
  Tensor<Scalar> g;
  g.steps.push_back(std::move(grad));
  return {value, net.backward(trace, g)};
}

}  // namespace nilm::nn
