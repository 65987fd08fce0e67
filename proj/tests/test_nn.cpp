#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nilm/models.hpp"
#include "nilm/nn/adam.hpp"
#include "nilm/nn/gradient_check.hpp"
#include "nilm/nn/network.hpp"

using namespace nilm;
using namespace nilm::nn;

namespace {

Tensor<double> random_tensor(Index length, Index features, Index batch, std::mt19937_64& gen) {
  Tensor<double> t(length, features, batch);
  std::normal_distribution<double> d;
  for (auto& s : t.steps)
    for (Index i = 0; i < s.size(); ++i) s.data()[i] = d(gen);
  return t;
}

template <typename L>
void randomize(L& layer, std::mt19937_64& gen, double scale = 0.5) {
  std::uniform_real_distribution<double> d(-scale, scale);
  for (auto& p : layer.parameters())
    for (Index i = 0; i < p.size(); ++i) p.value.data()[i] = d(gen);
}

template <typename S>
void randomize_network(Network<S>& net, std::mt19937_64& gen, double scale = 0.5) {
  for (std::size_t i = 0; i < net.size(); ++i) randomize(net.layer(i), gen, scale);
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

TEST(Conv1D, IdentityKernel) {
  Conv1D<double> conv(1, 1, 1);
  conv.parameters()[0].value(0, 0) = 1;
  std::mt19937_64 gen(1);
  const auto x = random_tensor(12, 1, 3, gen);
  const auto y = conv.forward(x, nullptr);
  ASSERT_EQ(y.length(), 12);
  for (Index t = 0; t < 12; ++t) EXPECT_EQ(y[t], x[t]);
}

TEST(Conv1D, DifferenceKernel) {
  Conv1D<double> conv(1, 1, 3);
  conv.parameters()[0].value << 1, 0, -1;
  Tensor<double> x(5, 1, 1);
  for (Index t = 0; t < 5; ++t) x[t](0, 0) = static_cast<double>(t + 1);
  const auto y = conv.forward(x, nullptr);
  ASSERT_EQ(y.length(), 3);
  for (Index t = 0; t < 3; ++t) EXPECT_DOUBLE_EQ(y[t](0, 0), -2.0);
}

TEST(Conv1D, MatchesDirectSum) {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Index cin = 1 + static_cast<Index>(gen() % 4), f = 1 + static_cast<Index>(gen() % 5),
                k = 1 + static_cast<Index>(gen() % 4), len = k + static_cast<Index>(gen() % 10);
    Conv1D<double> conv(cin, f, k);
    randomize(conv, gen);
    const auto x = random_tensor(len, cin, 2, gen);
    const auto y = conv.forward(x, nullptr);
    const auto& w = conv.parameters()[0].value;
    const auto& b = conv.parameters()[1].value;
    for (Index p = 0; p + k <= len; ++p)
      for (Index o = 0; o < f; ++o)
        for (Index n = 0; n < 2; ++n) {
          double s = b(o, 0);
          for (Index tap = 0; tap < k; ++tap)
            for (Index ch = 0; ch < cin; ++ch) s += w(o, tap * cin + ch) * x[p + tap](ch, n);
          ASSERT_NEAR(y[p](o, n), s, 1e-12);
        }
  }
}

TEST(Conv1D, ShapeErrorOnShortInput) {
  Network<float> net(Shape{2, 1});
  EXPECT_THROW(net.emplace<Conv1D<float>>(1, 4, 3), ShapeError);
}

TEST(MaxPool1D, PicksMaxima) {
  MaxPool1D<double> pool(2);
  Tensor<double> x(5, 1, 1);
  const double v[] = {1, 3, 2, -1, 9};
  for (Index t = 0; t < 5; ++t) x[t](0, 0) = v[t];
  const auto y = pool.forward(x, nullptr);
  ASSERT_EQ(y.length(), 2);
  EXPECT_EQ(y[0](0, 0), 3);
  EXPECT_EQ(y[1](0, 0), 2);
}

TEST(Dense, MatchesMatrixProduct) {
  std::mt19937_64 gen(4);
  Dense<double> d(96, 64);
  randomize(d, gen);
  const auto x = random_tensor(1, 96, 3, gen);
  const auto y = d.forward(x, nullptr);
  const MatrixXd expect = (d.parameters()[0].value * x[0]).colwise() + d.parameters()[1].value.col(0);
  EXPECT_TRUE(y[0].isApprox(expect, 1e-12));
  EXPECT_EQ(d.parameters()[0].size() + d.parameters()[1].size(), 6208);
}

TEST(Dense, ClosedFormGradient) {
  // L = mean((W x + b - y)^2) over a 1 x batch output.
  std::mt19937_64 gen(5);
  Network<double> net(Shape{1, 3});
  net.emplace<Dense<double>>(3, 1);
  randomize_network(net, gen);
  const auto x = random_tensor(1, 3, 4, gen);
  MatrixXd y = MatrixXd::Random(1, 4);
  const auto got = backward(net, x, y, LossKind::mean_squared_error);
  const MatrixXd r = net.forward(x)[0] - y;
  const MatrixXd dw = (2.0 / 4.0) * r * x[0].transpose();
  EXPECT_TRUE(got.grads[0][0].isApprox(dw, 1e-12));
  EXPECT_NEAR(got.grads[0][1](0, 0), 0.5 * r.sum(), 1e-12);
}

TEST(Softmax, ColumnsSumToOne) {
  std::mt19937_64 gen(6);
  const auto x = random_tensor(1, 5, 7, gen);
  Softmax<double> sm;
  const auto y = sm.forward(x, nullptr);
  for (Index c = 0; c < 7; ++c) {
    EXPECT_NEAR(y[0].col(c).sum(), 1.0, 1e-12);
    EXPECT_GT(y[0].col(c).minCoeff(), 0.0);
  }
}

TEST(Loss, CrossEntropyOfUniformIsLn2) {
  const MatrixXd logits = MatrixXd::Zero(2, 3);
  MatrixXd target = MatrixXd::Zero(2, 3);
  target(0, 0) = target(1, 1) = target(1, 2) = 1;
  EXPECT_NEAR(softmax_cross_entropy(logits, target).value, std::log(2.0), 1e-12);
}

TEST(Loss, CrossEntropyFloorsConfidentMistake) {
  MatrixXd logits(2, 1);
  logits << 0, 100;
  MatrixXd target(2, 1);
  target << 1, 0;
  EXPECT_NEAR(softmax_cross_entropy(logits, target).value, -std::log(1e-7), 1e-9);
}

TEST(Loss, MseValue) {
  MatrixXd p(1, 2), y(1, 2);
  p << 1, 3;
  y << 0, 1;
  EXPECT_DOUBLE_EQ(mean_squared_error(p, y).value, 2.5);
  EXPECT_THROW(mean_squared_error(p, MatrixXd(2, 1)), ShapeError);
}

TEST(LSTM, ZeroParametersGiveZeroOutput) {
  for (auto act : {CellActivation::relu, CellActivation::tanh}) {
    LSTM<double> lstm(1, 8, true, act);
    std::mt19937_64 gen(7);
    const auto y = lstm.forward(random_tensor(5, 1, 3, gen), nullptr);
    ASSERT_EQ(y.length(), 5);
    for (const auto& s : y.steps) EXPECT_EQ(s.norm(), 0.0);
  }
}

TEST(LSTM, MatchesScalarRecurrence) {
  std::mt19937_64 gen(8);
  for (auto act : {CellActivation::relu, CellActivation::tanh}) {
    const Index in = 2, u = 3, steps = 6;
    LSTM<double> lstm(in, u, true, act);
    randomize(lstm, gen);
    const auto x = random_tensor(steps, in, 1, gen);
    const auto y = lstm.forward(x, nullptr);
    const auto& wx = lstm.parameters()[0].value;
    const auto& wh = lstm.parameters()[1].value;
    const auto& b = lstm.parameters()[2].value;
    auto f = [&](double z) { return act == CellActivation::relu ? std::max(z, 0.0) : std::tanh(z); };
    std::vector<double> h(u, 0), c(u, 0);
    for (Index t = 0; t < steps; ++t) {
      std::vector<double> hn(u);
      for (Index j = 0; j < u; ++j) {
        double z[4];
        for (int g = 0; g < 4; ++g) {
          const Index row = g * u + j;
          z[g] = b(row, 0);
          for (Index k = 0; k < in; ++k) z[g] += wx(row, k) * x[t](k, 0);
          for (Index k = 0; k < u; ++k) z[g] += wh(row, k) * h[static_cast<std::size_t>(k)];
        }
        auto& cj = c[static_cast<std::size_t>(j)];
        cj = sigmoid(z[1]) * cj + sigmoid(z[0]) * f(z[2]);
        hn[static_cast<std::size_t>(j)] = sigmoid(z[3]) * f(cj);
      }
      h = hn;
      for (Index j = 0; j < u; ++j) ASSERT_NEAR(y[t](j, 0), h[static_cast<std::size_t>(j)], 1e-12);
    }
  }
}

TEST(LSTM, LastStepOnly) {
  LSTM<double> lstm(1, 4, false);
  std::mt19937_64 gen(9);
  randomize(lstm, gen);
  const auto x = random_tensor(5, 1, 2, gen);
  LSTM<double> seq(1, 4, true);
  for (std::size_t k = 0; k < 3; ++k) seq.parameters()[k].value = lstm.parameters()[k].value;
  EXPECT_EQ(lstm.forward(x, nullptr).length(), 1);
  EXPECT_EQ(lstm.forward(x, nullptr)[0], seq.forward(x, nullptr)[4]);
}

TEST(Network, ShapeErrorNamesLayer) {
  Network<float> net(Shape{20, 1});
  net.emplace<Conv1D<float>>(1, 4, 3);
  try {
    net.emplace<Dense<float>>(5, 2);
    FAIL();
  } catch (const ShapeError& e) {
    EXPECT_EQ(e.layer(), 1);
  }
  EXPECT_THROW(net.forward(Tensor<float>(19, 1, 1)), ShapeError);
}

TEST(Network, CastPreservesOutputs) {
  auto net = build_classifier<float>(20, 3);
  std::mt19937_64 gen(10);
  const auto x = random_tensor(20, 1, 4, gen);
  const auto yd = net.cast<double>().forward(x);
  const auto yf = net.forward(x.cast<float>());
  EXPECT_TRUE(yf[0].cast<double>().isApprox(yd[0], 1e-5));
}

TEST(GradientCheck, LinearNetwork) {
  std::mt19937_64 gen(11);
  Network<double> net(Shape{1, 4});
  net.emplace<Dense<double>>(4, 3);
  net.emplace<Dense<double>>(3, 1);
  randomize_network(net, gen);
  const auto x = random_tensor(1, 4, 5, gen);
  const MatrixXd y = MatrixXd::Random(1, 5);
  const auto r = gradient_check(net, x, y, LossKind::mean_squared_error, 200, 0);
  EXPECT_EQ(r.coordinates, 19u);
  EXPECT_LT(r.max_relative_error, 1e-9);
}

TEST(GradientCheck, SmallConvNetWithCrossEntropy) {
  std::mt19937_64 gen(12);
  Network<double> net(Shape{10, 1});
  net.emplace<Conv1D<double>>(1, 3, 3);
  net.emplace<ReLU<double>>();
  net.emplace<MaxPool1D<double>>(2);
  net.emplace<Flatten<double>>();
  net.emplace<Dense<double>>(12, 2);
  net.emplace<Softmax<double>>();
  randomize_network(net, gen);
  const auto x = random_tensor(10, 1, 4, gen);
  MatrixXd y = MatrixXd::Zero(2, 4);
  for (Index c = 0; c < 4; ++c) y(c % 2, c) = 1;
  const auto r = gradient_check(net, x, y, LossKind::cross_entropy, 1000, 1);
  EXPECT_LT(r.max_relative_error, 1e-8);
  EXPECT_GT(r.coordinates, 30u);
}

TEST(GradientCheck, TanhLstm) {
  std::mt19937_64 gen(13);
  Network<double> net(Shape{4, 1});
  net.emplace<LSTM<double>>(1, 3, true, CellActivation::tanh);
  net.emplace<LSTM<double>>(3, 2, false, CellActivation::tanh);
  net.emplace<Dense<double>>(2, 1);
  randomize_network(net, gen);
  const auto x = random_tensor(4, 1, 3, gen);
  const MatrixXd y = MatrixXd::Random(1, 3);
  const auto r = gradient_check(net, x, y, LossKind::mean_squared_error, 1000, 2);
  EXPECT_EQ(r.skipped_at_kinks, 0u);
  EXPECT_LT(r.max_relative_error, 1e-8);
}

TEST(Adam, ConvergesOnQuadratic) {
  // Fit a single dense weight to minimise (w x - 3x)^2.
  Network<double> net(Shape{1, 1});
  net.emplace<Dense<double>>(1, 1);
  AdamState<double> st(net, AdamConfig{0.05});
  Tensor<double> x(1, 1, 4);
  x[0] << 1, 2, -1, 0.5;
  const MatrixXd y = 3 * x[0];
  for (int i = 0; i < 2000; ++i) adam_step(net, backward(net, x, y, LossKind::mean_squared_error).grads, st);
  EXPECT_NEAR(net.layer(0).parameters()[0].value(0, 0), 3.0, 1e-3);
  EXPECT_NEAR(net.layer(0).parameters()[1].value(0, 0), 0.0, 1e-3);
}

TEST(Adam, FirstStepMovesByStepSize) {
  Network<double> net(Shape{1, 1});
  net.emplace<Dense<double>>(1, 1);
  AdamState<double> st(net, AdamConfig{0.01});
  auto g = net.zero_gradients();
  g[0][0](0, 0) = 123.0;
  g[0][1](0, 0) = -0.5;
  adam_step(net, g, st);
  EXPECT_NEAR(net.layer(0).parameters()[0].value(0, 0), -0.01, 1e-9);
  EXPECT_NEAR(net.layer(0).parameters()[1].value(0, 0), 0.01, 1e-7);
}

TEST(Adam, RejectsNonFiniteGradient) {
  Network<double> net(Shape{1, 1});
  net.emplace<Dense<double>>(1, 1);
  AdamState<double> st(net, AdamConfig{});
  auto g = net.zero_gradients();
  g[0][0](0, 0) = std::nan("");
  EXPECT_THROW(adam_step(net, g, st), TrainingError);
  EXPECT_EQ(net.layer(0).parameters()[0].value(0, 0), 0.0);
}
