#include <gtest/gtest.h>

#include <random>

#include "nilm/error.hpp"
#include "nilm/features.hpp"
#include "oracles.hpp"

using namespace nilm;

TEST(Scaler, FitAndRoundTrip) {
  const std::vector<float> v{10, 20, 30};
  const Scaler s = fit_scaler(std::span<const float>(v));
  EXPECT_EQ(s, (Scaler{10, 30}));
  EXPECT_DOUBLE_EQ(scale(20, s, Direction::forward), 0.5);
  EXPECT_DOUBLE_EQ(scale(0.5, s, Direction::inverse), 20.0);
  EXPECT_DOUBLE_EQ(scale(50, s, Direction::forward), 1.0);
  EXPECT_DOUBLE_EQ(scale(-5, s, Direction::forward), 0.0);
}

TEST(Scaler, Degenerate) {
  const std::vector<float> one{7, 7, 7};
  EXPECT_THROW(fit_scaler(std::span<const float>(one)), DataError);
  EXPECT_THROW(fit_scaler(std::span<const float>()), DataError);
}

TEST(Scaler, RandomRoundTrip) {
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 1000; ++trial) {
    std::uniform_real_distribution<double> d(-1e4, 1e4);
    std::vector<double> v(2 + gen() % 50);
    for (auto& x : v) x = d(gen);
    const Scaler s = fit_scaler(std::span<const double>(v));
    for (double x : v) {
      const double f = scale(x, s, Direction::forward);
      ASSERT_GE(f, 0.0);
      ASSERT_LE(f, 1.0);
      ASSERT_NEAR(scale(f, s, Direction::inverse), x, 1e-8 * (1 + std::abs(x)));
    }
  }
}

TEST(Scaler, ScaleInPlaceCountsClamps) {
  std::vector<float> v{-1, 0.5f, 2};
  EXPECT_EQ(scale_in_place(v, Scaler{0, 1}), 2u);
  EXPECT_EQ(v, (std::vector<float>{0, 0.5f, 1}));
}

TEST(MakeWindows, WindowTwentyTenSamples) {
  std::vector<float> seq(10);
  for (int i = 0; i < 10; ++i) seq[static_cast<std::size_t>(i)] = static_cast<float>(i + 1);
  const auto w = make_windows(seq, {}, 20);
  ASSERT_EQ(w.size(), 10);
  EXPECT_EQ(w.windows.cols(), 20);
  EXPECT_EQ(w.label_offset, 10);
  for (Index i = 0; i < 10; ++i) EXPECT_EQ(w.windows(i, 10), seq[static_cast<std::size_t>(i)]);
}

TEST(MakeWindows, MatchesPaddingOracle) {
  std::mt19937_64 gen(7);
  for (Index w : {1, 2, 15, 20, 25, 30}) {
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = 1 + gen() % 120;
      std::vector<float> seq(n);
      std::vector<std::uint8_t> states(n);
      for (std::size_t i = 0; i < n; ++i) {
        seq[i] = static_cast<float>(gen() % 1000) / 10.0f;
        states[i] = gen() % 2;
      }
      const auto ws = make_windows(seq, states, w);
      ASSERT_EQ(ws.size(), static_cast<Index>(n));
      ASSERT_EQ(ws.labels, states);
      for (Index i = 0; i < static_cast<Index>(n); ++i)
        for (Index k = 0; k < w; ++k)
          ASSERT_EQ(ws.windows(i, k), oracle::window_value(seq, i, w, k)) << "w=" << w << " i=" << i << " k=" << k;
    }
  }
}

TEST(MakeWindows, StateLengthMismatch) {
  const std::vector<float> seq(5, 1.0f);
  const std::vector<std::uint8_t> states(4, 0);
  EXPECT_THROW(make_windows(seq, states, 3), DataError);
}

TEST(MakeWindows, BatchLayout) {
  const std::vector<float> seq{1, 2, 3, 4, 5};
  const auto ws = make_windows(seq, {}, 3);
  const std::vector<Index> rows{4, 0};
  const auto t = ws.batch(rows);
  ASSERT_EQ(t.length(), 3);
  ASSERT_EQ(t.features(), 1);
  ASSERT_EQ(t.batch(), 2);
  EXPECT_EQ(t[0](0, 0), 4);
  EXPECT_EQ(t[1](0, 0), 5);
  EXPECT_EQ(t[2](0, 0), 0);
  EXPECT_EQ(t[0](0, 1), 0);
  EXPECT_EQ(t[1](0, 1), 1);
}

TEST(RunLengthIndex, Examples) {
  const std::vector<std::uint8_t> s{0, 1, 1, 1, 0, 0, 1, 1, 0};
  EXPECT_EQ(run_length_index(s), (std::vector<std::uint32_t>{0, 1, 2, 3, 0, 0, 1, 2, 0}));
  EXPECT_EQ(run_length_index(std::vector<std::uint8_t>(4, 0)), std::vector<std::uint32_t>(4, 0));
  EXPECT_EQ(run_length_index(std::vector<std::uint8_t>(4, 1)), (std::vector<std::uint32_t>{1, 2, 3, 4}));
}

TEST(RunLengthIndex, RecountOracle) {
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::uint8_t> s(1 + gen() % 200);
    for (auto& v : s) v = gen() % 3 != 0;
    ASSERT_EQ(run_length_index(s), oracle::run_lengths(s));
  }
}

TEST(RegressorSamples, LookbackOfRunningCycle) {
  const std::vector<std::uint8_t> s{0, 0, 1, 1, 1, 1, 1, 1, 1, 0};
  const auto idx = run_length_index(s);
  std::vector<float> p(s.size(), 0.0f);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i]) p[i] = 100.0f + static_cast<float>(i);
  const auto rs = make_regressor_samples(idx, p, Scaler{0, 200}, 10.0);
  ASSERT_EQ(rs.size(), 7);
  EXPECT_EQ(rs.positions.front(), 2u);
  // t = 8 has index 7, lookback 2..6.
  const Index r = 6;
  EXPECT_EQ(rs.positions[6], 8u);
  for (Index k = 0; k < 5; ++k) EXPECT_FLOAT_EQ(rs.inputs(r, k), static_cast<float>(k + 2) / 10.0f);
  EXPECT_FLOAT_EQ(rs.targets(r), 108.0f / 200.0f);
}

TEST(RegressorSamples, ZeroPaddedAtSeriesStart) {
  const std::vector<std::uint32_t> idx{1, 2};
  Eigen::RowVectorXf row(5);
  lookback_row(idx, 1, 1.0, row);
  EXPECT_EQ(row, (Eigen::RowVectorXf(5) << 0, 0, 0, 0, 1).finished());
}

TEST(RegressorSamples, MatchesOracle) {
  std::mt19937_64 gen(19);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::uint8_t> s(1 + gen() % 100);
    for (auto& v : s) v = gen() % 2;
    const auto idx = run_length_index(s);
    std::vector<float> p(s.size());
    for (auto& v : p) v = static_cast<float>(gen() % 500);
    const double scale_by = 1.0 + static_cast<double>(gen() % 20);
    const auto rs = make_regressor_samples(idx, p, Scaler{0, 500}, scale_by);
    Index r = 0;
    for (std::size_t t = 0; t < s.size(); ++t) {
      if (idx[t] == 0) continue;
      ASSERT_EQ(rs.positions[static_cast<std::size_t>(r)], t);
      for (Index k = 0; k < 5; ++k) {
        const auto src = static_cast<std::ptrdiff_t>(t) - 5 + k;
        const float expect = src < 0 ? 0.0f : static_cast<float>(idx[static_cast<std::size_t>(src)] / scale_by);
        ASSERT_FLOAT_EQ(rs.inputs(r, k), expect);
      }
      ASSERT_FLOAT_EQ(rs.targets(r), p[t] / 500.0f);
      ++r;
    }
    ASSERT_EQ(r, rs.size());
  }
}

TEST(RegressorSamples, DecayingFridgeTable) {
  const std::vector<std::uint8_t> states(6, 1);
  const std::vector<float> power{148, 135, 129, 127, 127, 125};
  const auto idx = run_length_index(states);
  EXPECT_EQ(idx, (std::vector<std::uint32_t>{1, 2, 3, 4, 5, 6}));
  const auto rs = make_regressor_samples(idx, power, Scaler{0, 1}, 1.0);
  const float x[6][5] = {{0, 0, 0, 0, 0}, {0, 0, 0, 0, 1}, {0, 0, 0, 1, 2},
                         {0, 0, 1, 2, 3}, {0, 1, 2, 3, 4}, {1, 2, 3, 4, 5}};
  ASSERT_EQ(rs.size(), 6);
  for (Index r = 0; r < 6; ++r)
    for (Index k = 0; k < 5; ++k) EXPECT_EQ(rs.inputs(r, k), x[r][k]);
  const auto raw = make_regressor_samples(idx, power, Scaler{0, 148}, 1.0);
  for (Index r = 0; r < 6; ++r)
    EXPECT_FLOAT_EQ(static_cast<float>(scale(raw.targets(r), Scaler{0, 148}, Direction::inverse)),
                    power[static_cast<std::size_t>(r)]);
}
