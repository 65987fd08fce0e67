#pragma once

// Brute-force reference implementations used by the unit and acceptance tests.
// Each one is written straight from the definition, without sharing code with
// the library.

#include <cmath>
#include <cstdint>
#include <vector>

#include "nilm/eval.hpp"
#include "nilm/ingest.hpp"

namespace oracle {

inline float missing() { return std::nanf(""); }

/// Bucket means computed one bucket at a time by rescanning every reading.
inline std::vector<float> bucket_means(const std::vector<nilm::Reading>& r, std::int64_t period, std::int64_t& start) {
  start = r.front().time - ((r.front().time % period) + period) % period;
  std::vector<float> out;
  for (std::int64_t b = start; b <= r.back().time; b += period) {
    double sum = 0;
    int n = 0;
    for (const auto& x : r)
      if (x.time >= b && x.time < b + period) {
        sum += x.watts;
        ++n;
      }
    out.push_back(n ? static_cast<float>(sum / n) : missing());
  }
  return out;
}

/// Marks every usable sample, then reads off maximal runs.
inline std::vector<nilm::GoodSection> sections(const std::vector<float>& v, std::size_t bridgeable) {
  const std::size_t n = v.size();
  std::vector<bool> usable(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(v[i])) continue;
    usable[i] = true;
    std::size_t j = i + 1;
    while (j < n && std::isnan(v[j])) ++j;
    if (j < n && j - i <= bridgeable)
      for (std::size_t k = i + 1; k < j; ++k) usable[k] = true;
  }
  std::vector<nilm::GoodSection> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!usable[i]) continue;
    std::size_t j = i;
    while (j < n && usable[j]) ++j;
    out.push_back({i, j - i});
    i = j;
  }
  return out;
}

/// Window i, column k holds sequence[i - floor(W/2) + k], zero outside.
inline float window_value(const std::vector<float>& seq, long i, long w, long k) {
  const long src = i - w / 2 + k;
  return src >= 0 && src < static_cast<long>(seq.size()) ? seq[static_cast<std::size_t>(src)] : 0.0f;
}

/// Counts consecutive on-steps ending at each t by walking backwards.
inline std::vector<std::uint32_t> run_lengths(const std::vector<std::uint8_t>& s) {
  std::vector<std::uint32_t> out(s.size());
  for (std::size_t t = 0; t < s.size(); ++t) {
    std::uint32_t n = 0;
    for (std::size_t k = t + 1; k-- > 0 && s[k];) ++n;
    out[t] = n;
  }
  return out;
}

/// The section padded with zeros or truncated to a multiple of w, or empty when dropped.
inline std::vector<float> continuous(const std::vector<float>& v, std::size_t w) {
  const std::size_t n = v.size(), rem = n % w;
  std::vector<float> out = v;
  if (rem * 2 >= w)
    out.resize(n + (w - rem), 0.0f);
  else
    out.resize(n - rem);
  return out;
}

inline nilm::ClassificationReport classification(const std::vector<std::uint8_t>& p,
                                                 const std::vector<std::uint8_t>& t) {
  double tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < p.size(); ++i) (p[i] ? (t[i] ? tp : fp) : (t[i] ? fn : tn)) += 1;
  nilm::ClassificationReport r;
  r.precision = tp + fp > 0 ? tp / (tp + fp) : 0;
  r.recall = tp + fn > 0 ? tp / (tp + fn) : 0;
  r.f1 = r.precision + r.recall > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0;
  r.accuracy = (tp + tn) / static_cast<double>(p.size());
  return r;
}

inline nilm::RegressionReport regression(const std::vector<float>& p, const std::vector<float>& t) {
  double ae = 0, se = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double e = static_cast<double>(p[i]) - static_cast<double>(t[i]);
    ae += std::abs(e);
    se += e * e;
  }
  const auto n = static_cast<double>(p.size());
  return {ae / n, se / n};
}

}  // namespace oracle
