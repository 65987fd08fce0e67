#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nilm/error.hpp"
#include "nilm/nn/tensor.hpp"

namespace nilm::nn {

/// Serialized layer kind. Values are part of the bundle file format.
enum class LayerKind : std::uint8_t {
  conv1d = 1,
  maxpool1d = 2,
  dense = 3,
  lstm = 4,
  relu = 5,
  softmax = 6,
  flatten = 7,
};

inline std::string_view to_string(LayerKind kind);

/// Nonlinearity on the candidate and cell-output paths of an LSTM cell.
enum class CellActivation : std::uint32_t { tanh = 0, relu = 1 };

/// Intermediates recorded by a forward pass and consumed by backward.
template <typename Scalar>
struct LayerCache {
  Tensor<Scalar> input;
  std::vector<Matrix<Scalar>> mats;
  std::vector<Eigen::MatrixXi> argmax;
};

/// A layer is immutable during forward/backward: caches and gradients live
/// outside it, so one network can serve concurrent inference calls.
template <typename Scalar>
class Layer {
 public:
  virtual ~Layer() = default;

  virtual LayerKind kind() const = 0;
  virtual std::vector<std::uint32_t> hyperparameters() const = 0;

  /// Throws ShapeError (without layer index; Network adds it).
  virtual Shape output_shape(const Shape& in) const = 0;

  virtual Tensor<Scalar> forward(const Tensor<Scalar>& x, LayerCache<Scalar>* cache) const = 0;

  /// Returns d(loss)/d(input); adds parameter gradients into `grads`.
  virtual Tensor<Scalar> backward(const Tensor<Scalar>& grad_out, const LayerCache<Scalar>& cache,
                                  std::span<Matrix<Scalar>> grads) const = 0;

  virtual std::span<Parameter<Scalar>> parameters() { return {}; }
  virtual std::span<const Parameter<Scalar>> parameters() const { return {}; }

  virtual std::unique_ptr<Layer> clone() const = 0;

  /// Appends the branch taken by every piecewise operation in the cached
  /// forward pass (ReLU sign, max-pool winner). Smooth layers append nothing.
  virtual void activation_pattern(const LayerCache<Scalar>&, std::vector<int>&) const {}
};

namespace detail {

template <typename Scalar>
Scalar sigmoid(Scalar z) {
  using std::exp;
  return Scalar(1) / (Scalar(1) + exp(-z));
}

template <typename Scalar>
Parameter<Scalar> make_param(std::string name, std::vector<std::uint32_t> shape) {
  Index rows = shape.empty() ? 1 : shape.front();
  Index cols = 1;
  for (std::size_t i = 1; i < shape.size(); ++i) cols *= shape[i];
  return Parameter<Scalar>{std::move(name), std::move(shape), Matrix<Scalar>::Zero(rows, cols)};
}

}  // namespace detail

/// Valid 1-D convolution, stride 1. Weight columns are ordered (tap, channel).
template <typename Scalar>
class Conv1D final : public Layer<Scalar> {
 public:
  Conv1D(Index in_channels, Index filters, Index kernel)
      : in_channels_(in_channels), filters_(filters), kernel_(kernel) {
    if (in_channels < 1 || filters < 1 || kernel < 1) throw ShapeError("conv1d: hyperparameters must be positive");
    const auto f = static_cast<std::uint32_t>(filters), k = static_cast<std::uint32_t>(kernel),
               c = static_cast<std::uint32_t>(in_channels);
    params_.push_back(detail::make_param<Scalar>("kernel", {f, k, c}));
    params_.push_back(detail::make_param<Scalar>("bias", {f}));
  }

  LayerKind kind() const override { return LayerKind::conv1d; }
  std::vector<std::uint32_t> hyperparameters() const override {
    return {static_cast<std::uint32_t>(in_channels_), static_cast<std::uint32_t>(filters_),
            static_cast<std::uint32_t>(kernel_)};
  }

  Shape output_shape(const Shape& in) const override {
    if (in.features != in_channels_)
      throw ShapeError("conv1d expects " + std::to_string(in_channels_) + " channels, got " +
                       std::to_string(in.features));
    if (in.length < kernel_)
      throw ShapeError("conv1d input length " + std::to_string(in.length) + " shorter than kernel " +
                       std::to_string(kernel_));
    return {in.length - kernel_ + 1, filters_};
  }

  Tensor<Scalar> forward(const Tensor<Scalar>& x, LayerCache<Scalar>* cache) const override {
    const Index positions = x.length() - kernel_ + 1;
    const Index batch = x.batch();
    Matrix<Scalar> cols = im2col(x, positions);
    Matrix<Scalar> out = params_[0].value * cols;
    out.colwise() += params_[1].value.col(0);
    Tensor<Scalar> y;
    y.steps.reserve(static_cast<std::size_t>(positions));
    for (Index p = 0; p < positions; ++p) y.steps.push_back(out.middleCols(p * batch, batch));
    if (cache) cache->mats = {std::move(cols)};
    return y;
  }

  Tensor<Scalar> backward(const Tensor<Scalar>& g, const LayerCache<Scalar>& cache,
                          std::span<Matrix<Scalar>> grads) const override {
    const Index positions = g.length();
    const Index batch = g.batch();
    Matrix<Scalar> gout(filters_, positions * batch);
    for (Index p = 0; p < positions; ++p) gout.middleCols(p * batch, batch) = g[p];
    const Matrix<Scalar>& cols = cache.mats[0];
    grads[0].noalias() += gout * cols.transpose();
    grads[1].col(0) += gout.rowwise().sum();
    const Matrix<Scalar> dcols = params_[0].value.transpose() * gout;
    Tensor<Scalar> dx(positions + kernel_ - 1, in_channels_, batch);
    for (Index p = 0; p < positions; ++p)
      for (Index k = 0; k < kernel_; ++k)
        dx[p + k] += dcols.block(k * in_channels_, p * batch, in_channels_, batch);
    return dx;
  }

  std::span<Parameter<Scalar>> parameters() override { return params_; }
  std::span<const Parameter<Scalar>> parameters() const override { return params_; }
  std::unique_ptr<Layer<Scalar>> clone() const override { return std::make_unique<Conv1D>(*this); }

 private:
  Matrix<Scalar> im2col(const Tensor<Scalar>& x, Index positions) const {
    const Index batch = x.batch();
    Matrix<Scalar> cols(kernel_ * in_channels_, positions * batch);
    for (Index p = 0; p < positions; ++p)
      for (Index k = 0; k < kernel_; ++k)
        cols.block(k * in_channels_, p * batch, in_channels_, batch) = x[p + k];
    return cols;
  }

  Index in_channels_, filters_, kernel_;
  std::vector<Parameter<Scalar>> params_;
};

/// Max pooling with stride equal to the pool width; a trailing partial window is dropped.
template <typename Scalar>
class MaxPool1D final : public Layer<Scalar> {
 public:
  explicit MaxPool1D(Index width) : width_(width) {
    if (width < 1) throw ShapeError("maxpool1d: width must be positive");
  }

  LayerKind kind() const override { return LayerKind::maxpool1d; }
  std::vector<std::uint32_t> hyperparameters() const override { return {static_cast<std::uint32_t>(width_)}; }

  Shape output_shape(const Shape& in) const override {
    if (in.length < width_) throw ShapeError("maxpool1d input shorter than pool width");
    return {in.length / width_, in.features};
  }

  Tensor<Scalar> forward(const Tensor<Scalar>& x, LayerCache<Scalar>* cache) const override {
    const Index out_len = x.length() / width_;
    Tensor<Scalar> y;
    std::vector<Eigen::MatrixXi> arg;
    y.steps.reserve(static_cast<std::size_t>(out_len));
    for (Index p = 0; p < out_len; ++p) {
      Matrix<Scalar> m = x[p * width_];
      Eigen::MatrixXi a = Eigen::MatrixXi::Constant(m.rows(), m.cols(), static_cast<int>(p * width_));
      for (Index j = 1; j < width_; ++j) {
        const Matrix<Scalar>& s = x[p * width_ + j];
        for (Index c = 0; c < m.cols(); ++c)
          for (Index r = 0; r < m.rows(); ++r)
            if (s(r, c) > m(r, c)) {
              m(r, c) = s(r, c);
              a(r, c) = static_cast<int>(p * width_ + j);
            }
      }
      y.steps.push_back(std::move(m));
      arg.push_back(std::move(a));
    }
    if (cache) {
      cache->argmax = std::move(arg);
      cache->mats = {Matrix<Scalar>::Constant(1, 1, static_cast<Scalar>(x.length()))};
    }
    return y;
  }

  void activation_pattern(const LayerCache<Scalar>& cache, std::vector<int>& out) const override {
    for (const auto& a : cache.argmax) out.insert(out.end(), a.data(), a.data() + a.size());
  }

  Tensor<Scalar> backward(const Tensor<Scalar>& g, const LayerCache<Scalar>& cache,
                          std::span<Matrix<Scalar>>) const override {
    const auto in_len = static_cast<Index>(cache.mats[0](0, 0));
    Tensor<Scalar> dx(in_len, g.features(), g.batch());
    for (Index p = 0; p < g.length(); ++p) {
      const auto& a = cache.argmax[static_cast<std::size_t>(p)];
      for (Index c = 0; c < a.cols(); ++c)
        for (Index r = 0; r < a.rows(); ++r) dx[a(r, c)](r, c) += g[p](r, c);
    }
    return dx;
  }

  std::unique_ptr<Layer<Scalar>> clone() const override { return std::make_unique<MaxPool1D>(*this); }

 private:
  Index width_;
};

/// Fully connected, applied independently at every step.
template <typename Scalar>
class Dense final : public Layer<Scalar> {
 public:
  Dense(Index in, Index out) : in_(in), out_(out) {
    if (in < 1 || out < 1) throw ShapeError("dense: sizes must be positive");
    params_.push_back(detail::make_param<Scalar>(
        "kernel", {static_cast<std::uint32_t>(out), static_cast<std::uint32_t>(in)}));
    params_.push_back(detail::make_param<Scalar>("bias", {static_cast<std::uint32_t>(out)}));
  }

  LayerKind kind() const override { return LayerKind::dense; }
  std::vector<std::uint32_t> hyperparameters() const override {
    return {static_cast<std::uint32_t>(in_), static_cast<std::uint32_t>(out_)};
  }

  Shape output_shape(const Shape& in) const override {
    if (in.features != in_)
      throw ShapeError("dense expects " + std::to_string(in_) + " features, got " + std::to_string(in.features));
    return {in.length, out_};
  }

  Tensor<Scalar> forward(const Tensor<Scalar>& x, LayerCache<Scalar>* cache) const override {
    Tensor<Scalar> y;
    y.steps.reserve(x.steps.size());
    for (const auto& s : x.steps) {
      Matrix<Scalar> o = params_[0].value * s;
      o.colwise() += params_[1].value.col(0);
      y.steps.push_back(std::move(o));
    }
    if (cache) cache->input = x;
    return y;
  }

  Tensor<Scalar> backward(const Tensor<Scalar>& g, const LayerCache<Scalar>& cache,
                          std::span<Matrix<Scalar>> grads) const override {
    Tensor<Scalar> dx;
    dx.steps.reserve(g.steps.size());
    for (Index t = 0; t < g.length(); ++t) {
      grads[0].noalias() += g[t] * cache.input[t].transpose();
      grads[1].col(0) += g[t].rowwise().sum();
      dx.steps.push_back(params_[0].value.transpose() * g[t]);
    }
    return dx;
  }

  std::span<Parameter<Scalar>> parameters() override { return params_; }
  std::span<const Parameter<Scalar>> parameters() const override { return params_; }
  std::unique_ptr<Layer<Scalar>> clone() const override { return std::make_unique<Dense>(*this); }

 private:
  Index in_, out_;
  std::vector<Parameter<Scalar>> params_;
};

template <typename Scalar>
class ReLU final : public Layer<Scalar> {
 public:
  LayerKind kind() const override { return LayerKind::relu; }
  std::vector<std::uint32_t> hyperparameters() const override { return {}; }
  Shape output_shape(const Shape& in) const override { return in; }

  Tensor<Scalar> forward(const Tensor<Scalar>& x, LayerCache<Scalar>* cache) const override {
    Tensor<Scalar> y;
    y.steps.reserve(x.steps.size());
    for (const auto& s : x.steps) y.steps.push_back(s.cwiseMax(Scalar(0)));
    if (cache) cache->input = x;
    return y;
  }

  Tensor<Scalar> backward(const Tensor<Scalar>& g, const LayerCache<Scalar>& cache,
                          std::span<Matrix<Scalar>>) const override {
    Tensor<Scalar> dx;
    dx.steps.reserve(g.steps.size());
    for (Index t = 0; t < g.length(); ++t)
      dx.steps.push_back((cache.input[t].array() > Scalar(0)).select(g[t], Scalar(0)));
    return dx;
  }

  void activation_pattern(const LayerCache<Scalar>& cache, std::vector<int>& out) const override {
    for (const auto& s : cache.input.steps)
      for (Index i = 0; i < s.size(); ++i) out.push_back(s.data()[i] > Scalar(0));
  }

  std::unique_ptr<Layer<Scalar>> clone() const override { return std::make_unique<ReLU>(*this); }
};

/// Column-wise softmax over the feature axis.
template <typename Scalar>
class Softmax final : public Layer<Scalar> {
 public:
  LayerKind kind() const override { return LayerKind::softmax; }
  std::vector<std::uint32_t> hyperparameters() const override { return {}; }
  Shape output_shape(const Shape& in) const override { return in; }

  static Matrix<Scalar> apply(const Matrix<Scalar>& logits) {
    Matrix<Scalar> p = (logits.rowwise() - logits.colwise().maxCoeff()).array().exp().matrix();
    p.array().rowwise() /= p.colwise().sum().array();
    return p;
  }

  Tensor<Scalar> forward(const Tensor<Scalar>& x, LayerCache<Scalar>* cache) const override {
    Tensor<Scalar> y;
    y.steps.reserve(x.steps.size());
    for (const auto& s : x.steps) y.steps.push_back(apply(s));
    if (cache) cache->mats = y.steps;
    return y;
  }

  Tensor<Scalar> backward(const Tensor<Scalar>& g, const LayerCache<Scalar>& cache,
                          std::span<Matrix<Scalar>>) const override {
    Tensor<Scalar> dx;
    dx.steps.reserve(g.steps.size());
    for (Index t = 0; t < g.length(); ++t) {
      const Matrix<Scalar>& p = cache.mats[static_cast<std::size_t>(t)];
      Matrix<Scalar> dot = (g[t].array() * p.array()).colwise().sum();
      dx.steps.push_back((p.array() * (g[t].rowwise() - dot.row(0)).array()).matrix());
    }
    return dx;
  }

  std::unique_ptr<Layer<Scalar>> clone() const override { return std::make_unique<Softmax>(*this); }
};

/// Collapses (length x features) into one step of length*features, position-major.
template <typename Scalar>
class Flatten final : public Layer<Scalar> {
 public:
  LayerKind kind() const override { return LayerKind::flatten; }
  std::vector<std::uint32_t> hyperparameters() const override { return {}; }
  Shape output_shape(const Shape& in) const override { return {1, in.length * in.features}; }

  Tensor<Scalar> forward(const Tensor<Scalar>& x, LayerCache<Scalar>* cache) const override {
    const Index f = x.features();
    Matrix<Scalar> out(x.length() * f, x.batch());
    for (Index t = 0; t < x.length(); ++t) out.middleRows(t * f, f) = x[t];
    if (cache) {
      cache->mats = {Matrix<Scalar>(1, 2)};
      cache->mats[0] << Scalar(x.length()), Scalar(f);
    }
    Tensor<Scalar> y;
    y.steps.push_back(std::move(out));
    return y;
  }

  Tensor<Scalar> backward(const Tensor<Scalar>& g, const LayerCache<Scalar>& cache,
                          std::span<Matrix<Scalar>>) const override {
    const auto len = static_cast<Index>(cache.mats[0](0, 0));
    const auto f = static_cast<Index>(cache.mats[0](0, 1));
    Tensor<Scalar> dx;
    dx.steps.reserve(static_cast<std::size_t>(len));
    for (Index t = 0; t < len; ++t) dx.steps.push_back(g[0].middleRows(t * f, f));
    return dx;
  }

  std::unique_ptr<Layer<Scalar>> clone() const override { return std::make_unique<Flatten>(*this); }
};

/// LSTM with gate order (input, forget, candidate, output).
///
///   z   = Wx x_t + Wh h_{t-1} + b
///   c_t = sigmoid(z_f) * c_{t-1} + sigmoid(z_i) * act(z_g)
///   h_t = sigmoid(z_o) * act(c_t)
///
/// `act` is tanh or ReLU. Emits every h_t when `return_sequences`, else only h_T.
template <typename Scalar>
class LSTM final : public Layer<Scalar> {
 public:
  LSTM(Index in, Index units, bool return_sequences, CellActivation activation = CellActivation::relu)
      : in_(in), units_(units), return_sequences_(return_sequences), activation_(activation) {
    if (in < 1 || units < 1) throw ShapeError("lstm: sizes must be positive");
    const auto u4 = static_cast<std::uint32_t>(4 * units);
    params_.push_back(detail::make_param<Scalar>("input_kernel", {u4, static_cast<std::uint32_t>(in)}));
    params_.push_back(detail::make_param<Scalar>("recurrent_kernel", {u4, static_cast<std::uint32_t>(units)}));
    params_.push_back(detail::make_param<Scalar>("bias", {u4}));
  }

  LayerKind kind() const override { return LayerKind::lstm; }
  std::vector<std::uint32_t> hyperparameters() const override {
    return {static_cast<std::uint32_t>(in_), static_cast<std::uint32_t>(units_), return_sequences_ ? 1u : 0u,
            static_cast<std::uint32_t>(activation_)};
  }

  Index units() const { return units_; }
  bool return_sequences() const { return return_sequences_; }
  CellActivation activation() const { return activation_; }

  Shape output_shape(const Shape& in) const override {
    if (in.features != in_)
      throw ShapeError("lstm expects " + std::to_string(in_) + " features, got " + std::to_string(in.features));
    if (in.length < 1) throw ShapeError("lstm needs a non-empty sequence");
    return {return_sequences_ ? in.length : 1, units_};
  }

  // Cache layout per step t (stride 7): i, f, g, o, c, act(c), z_g.
  Tensor<Scalar> forward(const Tensor<Scalar>& x, LayerCache<Scalar>* cache) const override {
    const Index steps = x.length();
    const Index batch = x.batch();
    const Index u = units_;
    Matrix<Scalar> h = Matrix<Scalar>::Zero(u, batch);
    Matrix<Scalar> c = Matrix<Scalar>::Zero(u, batch);
    Tensor<Scalar> y;
    if (cache) {
      cache->input = x;
      cache->mats.clear();
      cache->mats.reserve(static_cast<std::size_t>(7 * steps));
    }
    for (Index t = 0; t < steps; ++t) {
      Matrix<Scalar> z = params_[0].value * x[t];
      z.noalias() += params_[1].value * h;
      z.colwise() += params_[2].value.col(0);
      Matrix<Scalar> ig = z.middleRows(0, u).unaryExpr([](Scalar v) { return detail::sigmoid(v); });
      Matrix<Scalar> fg = z.middleRows(u, u).unaryExpr([](Scalar v) { return detail::sigmoid(v); });
      Matrix<Scalar> zg = z.middleRows(2 * u, u);
      Matrix<Scalar> gg = act(zg);
      Matrix<Scalar> og = z.middleRows(3 * u, u).unaryExpr([](Scalar v) { return detail::sigmoid(v); });
      c = (fg.array() * c.array() + ig.array() * gg.array()).matrix();
      Matrix<Scalar> ac = act(c);
      h = (og.array() * ac.array()).matrix();
      if (return_sequences_ || t + 1 == steps) y.steps.push_back(h);
      if (cache) {
        cache->mats.push_back(std::move(ig));
        cache->mats.push_back(std::move(fg));
        cache->mats.push_back(std::move(gg));
        cache->mats.push_back(std::move(og));
        cache->mats.push_back(c);
        cache->mats.push_back(std::move(ac));
        cache->mats.push_back(std::move(zg));
      }
    }
    return y;
  }

  Tensor<Scalar> backward(const Tensor<Scalar>& g, const LayerCache<Scalar>& cache,
                          std::span<Matrix<Scalar>> grads) const override {
    const Tensor<Scalar>& x = cache.input;
    const Index steps = x.length();
    const Index batch = x.batch();
    const Index u = units_;
    auto at = [&](Index t, int k) -> const Matrix<Scalar>& {
      return cache.mats[static_cast<std::size_t>(7 * t + k)];
    };
    Matrix<Scalar> dh_next = Matrix<Scalar>::Zero(u, batch);
    Matrix<Scalar> dc_next = Matrix<Scalar>::Zero(u, batch);
    Matrix<Scalar> dz(4 * u, batch);
    Tensor<Scalar> dx(steps, in_, batch);
    for (Index t = steps - 1; t >= 0; --t) {
      Matrix<Scalar> dh = dh_next;
      if (return_sequences_)
        dh += g[t];
      else if (t + 1 == steps)
        dh += g[0];
      const auto& ig = at(t, 0);
      const auto& fg = at(t, 1);
      const auto& gg = at(t, 2);
      const auto& og = at(t, 3);
      const auto& c = at(t, 4);
      const auto& ac = at(t, 5);
      const auto& zg = at(t, 6);
      const Matrix<Scalar> c_prev = t > 0 ? at(t - 1, 4) : Matrix<Scalar>::Zero(u, batch);
      const Matrix<Scalar> h_prev =
          t > 0 ? Matrix<Scalar>((at(t - 1, 3).array() * at(t - 1, 5).array()).matrix())
                : Matrix<Scalar>::Zero(u, batch);

      const auto d_o = (dh.array() * ac.array()).eval();
      Matrix<Scalar> dc = (dh.array() * og.array() * act_grad(c).array()).matrix() + dc_next;
      dz.middleRows(0, u) = (dc.array() * gg.array() * ig.array() * (Scalar(1) - ig.array())).matrix();
      dz.middleRows(u, u) = (dc.array() * c_prev.array() * fg.array() * (Scalar(1) - fg.array())).matrix();
      dz.middleRows(2 * u, u) = (dc.array() * ig.array() * act_grad(zg).array()).matrix();
      dz.middleRows(3 * u, u) = (d_o * og.array() * (Scalar(1) - og.array())).matrix();
      dc_next = (dc.array() * fg.array()).matrix();

      grads[0].noalias() += dz * x[t].transpose();
      grads[1].noalias() += dz * h_prev.transpose();
      grads[2].col(0) += dz.rowwise().sum();
      dx[t].noalias() = params_[0].value.transpose() * dz;
      dh_next.noalias() = params_[1].value.transpose() * dz;
    }
    return dx;
  }

  std::span<Parameter<Scalar>> parameters() override { return params_; }
  std::span<const Parameter<Scalar>> parameters() const override { return params_; }
  std::unique_ptr<Layer<Scalar>> clone() const override { return std::make_unique<LSTM>(*this); }

  void activation_pattern(const LayerCache<Scalar>& cache, std::vector<int>& out) const override {
    if (activation_ != CellActivation::relu) return;
    for (std::size_t k = 0; k < cache.mats.size(); k += 7) {
      for (const auto* m : {&cache.mats[k + 6], &cache.mats[k + 4]})
        for (Index i = 0; i < m->size(); ++i) out.push_back(m->data()[i] > Scalar(0));
    }
  }

 private:
  Matrix<Scalar> act(const Matrix<Scalar>& z) const {
    if (activation_ == CellActivation::relu) return z.cwiseMax(Scalar(0));
    return z.array().tanh().matrix();
  }

  Matrix<Scalar> act_grad(const Matrix<Scalar>& z) const {
    if (activation_ == CellActivation::relu) return (z.array() > Scalar(0)).select(Matrix<Scalar>::Ones(z.rows(), z.cols()), Scalar(0));
    return (Scalar(1) - z.array().tanh().square()).matrix();
  }

  Index in_, units_;
  bool return_sequences_;
  CellActivation activation_;
  std::vector<Parameter<Scalar>> params_;
};

/// Builds a zero-initialised layer from its serialized description.
template <typename Scalar>
std::unique_ptr<Layer<Scalar>> make_layer(LayerKind kind, std::span<const std::uint32_t> hp) {
  auto need = [&](std::size_t n) {
    if (hp.size() != n)
      throw ShapeError(std::string(to_string(kind)) + ": expected " + std::to_string(n) + " hyperparameters, got " +
                       std::to_string(hp.size()));
  };
  switch (kind) {
    case LayerKind::conv1d:
      need(3);
      return std::make_unique<Conv1D<Scalar>>(hp[0], hp[1], hp[2]);
    case LayerKind::maxpool1d:
      need(1);
      return std::make_unique<MaxPool1D<Scalar>>(hp[0]);
    case LayerKind::dense:
      need(2);
      return std::make_unique<Dense<Scalar>>(hp[0], hp[1]);
    case LayerKind::lstm:
      need(4);
      if (hp[3] > 1) throw ShapeError("lstm: unknown cell activation " + std::to_string(hp[3]));
      return std::make_unique<LSTM<Scalar>>(hp[0], hp[1], hp[2] != 0, static_cast<CellActivation>(hp[3]));
    case LayerKind::relu:
      need(0);
      return std::make_unique<ReLU<Scalar>>();
    case LayerKind::softmax:
      need(0);
      return std::make_unique<Softmax<Scalar>>();
    case LayerKind::flatten:
      need(0);
      return std::make_unique<Flatten<Scalar>>();
  }
  throw ShapeError("unknown layer kind " + std::to_string(static_cast<int>(kind)));
}

inline std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::conv1d: return "conv1d";
    case LayerKind::maxpool1d: return "maxpool1d";
    case LayerKind::dense: return "dense";
    case LayerKind::lstm: return "lstm";
    case LayerKind::relu: return "relu";
    case LayerKind::softmax: return "softmax";
    case LayerKind::flatten: return "flatten";
  }
  return "unknown";
}

}  // namespace nilm::nn
