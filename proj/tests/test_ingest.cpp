#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <random>

#include "nilm/error.hpp"
#include "nilm/ingest.hpp"
#include "oracles.hpp"

using namespace nilm;

TEST(ParseLabels, EmptyFile) { EXPECT_TRUE(parse_labels("").empty()); }

TEST(ParseLabels, KeepsOrder) {
  const auto m = parse_labels("1 mains\n2 mains\n5 refrigerator", 1);
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(m[0], (ChannelMeta{1, 1, "mains"}));
  EXPECT_EQ(m[1], (ChannelMeta{1, 2, "mains"}));
  EXPECT_EQ(m[2], (ChannelMeta{1, 5, "refrigerator"}));
}

TEST(ParseLabels, TwentyChannelHouse) {
  std::string text;
  for (int i = 1; i <= 20; ++i) text += std::to_string(i) + " label_" + std::to_string(i % 7) + "\n";
  const auto m = parse_labels(text);
  ASSERT_EQ(m.size(), 20u);
  std::set<int> ids;
  for (const auto& c : m) ids.insert(c.channel_id);
  EXPECT_EQ(ids.size(), 20u);
}

TEST(ParseLabels, MalformedLineNamesLine) {
  try {
    parse_labels("1 mains\nbogus\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_labels("1 mains\n1 mains\n"), ParseError);
}

TEST(ParseChannel, SingleLine) {
  const auto r = parse_channel("1303132929 245.5");
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0], (Reading{1303132929, 245.5}));
}

TEST(ParseChannel, TwoLinesThreeSecondsApart) {
  const auto r = parse_channel("1303132929 1.0\n1303132932 2.0\n");
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[1].time - r[0].time, 3);
}

TEST(ParseChannel, Errors) {
  EXPECT_THROW(parse_channel("10 1.0\n10 2.0\n"), ParseError);
  EXPECT_THROW(parse_channel("10 1.0\n9 2.0\n"), ParseError);
  EXPECT_THROW(parse_channel("10 abc\n"), ParseError);
  EXPECT_THROW(parse_channel("x 1.0\n"), ParseError);
}

TEST(ParseChannel, RoundTrip) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Reading> r;
    std::int64_t t = 1303000000 + static_cast<std::int64_t>(gen() % 1000);
    for (int i = 0; i < 50; ++i) {
      t += 1 + static_cast<std::int64_t>(gen() % 5);
      r.push_back({t, std::uniform_real_distribution<double>(0, 3000)(gen)});
    }
    const auto text = format_channel(r);
    EXPECT_EQ(parse_channel(text), r);
    EXPECT_EQ(format_channel(parse_channel(text)), text);
  }
}

TEST(ResampleMean, ConstantSeries) {
  std::vector<Reading> r;
  for (int t = 0; t < 600; t += 3) r.push_back({1303132800 + t, 100.0});
  const auto s = resample_mean(r, 60);
  ASSERT_EQ(s.size(), 10u);
  for (float v : s.values) EXPECT_FLOAT_EQ(v, 100.0f);
}

TEST(ResampleMean, TwoPointMean) {
  const auto s = resample_mean({{1303132800, 100.0}, {1303132830, 200.0}}, 60);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_FLOAT_EQ(s.values[0], 150.0f);
}

TEST(ResampleMean, EmptyBucketsAreMissing) {
  const auto s = resample_mean({{0, 1.0}, {150, 2.0}}, 60);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_TRUE(is_missing(s.values[1]));
  EXPECT_THROW(resample_mean({}, 60), DataError);
}

TEST(ResampleMean, MatchesBucketOracle) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Reading> r;
    std::int64_t t = static_cast<std::int64_t>(gen() % 100000);
    const int n = 1 + static_cast<int>(gen() % 300);
    for (int i = 0; i < n; ++i) {
      t += 1 + static_cast<std::int64_t>(gen() % (gen() % 10 == 0 ? 400 : 6));
      r.push_back({t, std::uniform_real_distribution<double>(0, 2000)(gen)});
    }
    std::int64_t start = 0;
    const auto expect = oracle::bucket_means(r, 60, start);
    const auto got = resample_mean(r, 60);
    ASSERT_EQ(got.start_time, start);
    ASSERT_EQ(got.size(), expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i) {
      if (is_missing(expect[i]))
        EXPECT_TRUE(is_missing(got.values[i]));
      else
        EXPECT_NEAR(got.values[i], expect[i], 1e-3f);
    }
  }
}

TEST(ResampleMean, PreservesEnergyOfCoveredBuckets) {
  std::mt19937_64 gen(5);
  std::vector<Reading> r;
  double energy = 0;
  for (int t = 0; t < 3600; t += 3) {
    const double w = std::uniform_real_distribution<double>(0, 1500)(gen);
    r.push_back({1303132800 + t, w});
    energy += w * 3;
  }
  const auto s = resample_mean(r, 60);
  double resampled = 0;
  for (float v : s.values) resampled += static_cast<double>(v) * 60;
  EXPECT_NEAR(resampled, energy, 0.01 * energy);
}

TEST(GoodSections, Gapless) {
  PowerSeries s{0, 60, std::vector<float>(100, 5.0f)};
  EXPECT_EQ(good_sections(s, 60), (std::vector<GoodSection>{{0, 100}}));
}

TEST(GoodSections, OneMissingSampleSplits) {
  PowerSeries s{0, 60, std::vector<float>(100, 5.0f)};
  s.values[50] = kMissing;
  EXPECT_EQ(good_sections(s, 60), (std::vector<GoodSection>{{0, 50}, {51, 49}}));
}

TEST(GoodSections, ShortGapsBridgedWithinTolerance) {
  PowerSeries s{0, 60, std::vector<float>(20, 5.0f)};
  s.values[5] = s.values[6] = kMissing;  // 3-minute gap between readings
  EXPECT_EQ(good_sections(s, 180), (std::vector<GoodSection>{{0, 20}}));
  s.values[7] = kMissing;  // 4 minutes
  EXPECT_EQ(good_sections(s, 180), (std::vector<GoodSection>{{0, 5}, {8, 12}}));
}

TEST(GoodSections, AllMissing) {
  PowerSeries s{0, 60, std::vector<float>(10, kMissing)};
  EXPECT_TRUE(good_sections(s, 180).empty());
}

TEST(GoodSections, MatchesRunLengthOracle) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + gen() % 500;
    const double p = std::uniform_real_distribution<double>(0, 0.5)(gen);
    PowerSeries s{0, 60, std::vector<float>(n, 1.0f)};
    for (auto& v : s.values)
      if (std::bernoulli_distribution(p)(gen)) v = kMissing;
    const std::int64_t max_gap = 60 * static_cast<std::int64_t>(1 + gen() % 4);
    ASSERT_EQ(good_sections(s, max_gap), oracle::sections(s.values, static_cast<std::size_t>(max_gap / 60)));
  }
}

TEST(ForwardFill, FillsInsideSection) {
  PowerSeries s{0, 60, {1.0f, kMissing, kMissing, 4.0f}};
  forward_fill(s, {0, 4});
  EXPECT_EQ(s.values, (std::vector<float>{1, 1, 1, 4}));
}

TEST(BuildAggregate, SumsIdenticalSeries) {
  PowerSeries a{0, 60, std::vector<float>(100, 100.0f)};
  const auto s = build_aggregate(a, a);
  ASSERT_EQ(s.size(), 100u);
  for (float v : s.values) EXPECT_FLOAT_EQ(v, 200.0f);
}

TEST(BuildAggregate, MissingSidePropagates) {
  PowerSeries a{0, 60, std::vector<float>(10, 100.0f)};
  PowerSeries b{0, 60, std::vector<float>(10, kMissing)};
  for (float v : build_aggregate(a, b).values) EXPECT_TRUE(is_missing(v));
}

TEST(BuildAggregate, IntersectionOfShiftedRanges) {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::int64_t sa = 60 * static_cast<std::int64_t>(gen() % 50), sb = 60 * static_cast<std::int64_t>(gen() % 50);
    const std::size_t na = 1 + gen() % 100, nb = 1 + gen() % 100;
    PowerSeries a{sa, 60, std::vector<float>(na, 1.0f)}, b{sb, 60, std::vector<float>(nb, 2.0f)};
    const std::int64_t lo = std::max(sa, sb), hi = std::min(a.end_time(), b.end_time());
    if (hi <= lo) {
      EXPECT_THROW(build_aggregate(a, b), DataError);
      continue;
    }
    const auto s = build_aggregate(a, b);
    EXPECT_EQ(s.start_time, lo);
    EXPECT_EQ(static_cast<std::int64_t>(s.size()), (hi - lo) / 60);
  }
}

TEST(BuildAggregate, PeriodMismatch) {
  EXPECT_THROW(build_aggregate(PowerSeries{0, 60, {1}}, PowerSeries{0, 30, {1}}), DataError);
}

TEST(LoadHouse, ReadsDatasetLayout) {
  const auto root = std::filesystem::temp_directory_path() / "nilm_ingest_layout";
  std::filesystem::remove_all(root);
  std::filesystem::create_directories(root / "house_3");
  {
    std::ofstream(root / "house_3" / "labels.dat") << "1 mains\n2 mains\n3 microwave\n";
    std::ofstream m1(root / "house_3" / "channel_1.dat"), m2(root / "house_3" / "channel_2.dat"),
        ap(root / "house_3" / "channel_3.dat");
    for (int t = 0; t < 600; t += 3) {
      m1 << 1303132800 + t << " 100\n";
      m2 << 1303132800 + t << " 50\n";
      ap << 1303132800 + t << " 7\n";
    }
  }
  const House h = load_house(root, 3);
  ASSERT_EQ(h.mains.size(), 10u);
  EXPECT_FLOAT_EQ(h.mains.values[4], 150.0f);
  const auto app = load_appliance(root, h, {"microwave"});
  ASSERT_EQ(app.size(), 10u);
  EXPECT_FLOAT_EQ(app.values[9], 7.0f);
  EXPECT_THROW(load_appliance(root, h, {"oven"}), DataError);
  std::filesystem::remove_all(root);
}
