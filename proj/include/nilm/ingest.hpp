#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace nilm {

/// Marker for a sample with no reading.
inline constexpr float kMissing = std::numeric_limits<float>::quiet_NaN();

inline bool is_missing(float v) { return std::isnan(v); }

/// Equally spaced watt readings starting at `start_time` (unix seconds).
struct PowerSeries {
  std::int64_t start_time = 0;
  std::int64_t period = 60;
  std::vector<float> values;

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
  std::int64_t time_at(std::size_t i) const { return start_time + static_cast<std::int64_t>(i) * period; }
  std::int64_t end_time() const { return time_at(values.size()); }

  /// Samples [first, first + count) as a new series.
  PowerSeries slice(std::size_t first, std::size_t count) const;
};

/// One raw reading as stored in a channel file.
struct Reading {
  std::int64_t time;
  double watts;
  friend bool operator==(const Reading&, const Reading&) = default;
};

struct ChannelMeta {
  int house_id = 0;
  int channel_id = 0;
  std::string label;
  friend bool operator==(const ChannelMeta&, const ChannelMeta&) = default;
};

/// Maximal run of usable samples: [start_index, start_index + length).
struct GoodSection {
  std::size_t start_index = 0;
  std::size_t length = 0;
  friend bool operator==(const GoodSection&, const GoodSection&) = default;
};

/// Parses a `labels.dat` index ("<channel> <label>" per line).
std::vector<ChannelMeta> parse_labels(std::string_view text, int house_id = 0);

/// Parses a `channel_<n>.dat` file ("<unix_seconds> <watts>" per line).
/// Timestamps must be strictly increasing.
std::vector<Reading> parse_channel(std::string_view text);

/// Inverse of parse_channel. Watts are written with the shortest
/// representation that parses back to the same double.
std::string format_channel(const std::vector<Reading>& readings);

/// Bucket means on an absolute grid: bucket k covers
/// [start + k*period, start + (k+1)*period) with start = floor(t0/period)*period.
/// Buckets without readings are missing.
PowerSeries resample_mean(const std::vector<Reading>& readings, std::int64_t period = 60);

/// Maximal runs with no missing value and no gap between present samples
/// longer than `max_gap` seconds. Missing runs short enough to be bridged
/// are included inside a section; sections never start or end on a missing sample.
std::vector<GoodSection> good_sections(const PowerSeries& series, std::int64_t max_gap);

/// Replaces missing samples inside `section` with the previous reading.
void forward_fill(PowerSeries& series, const GoodSection& section);

/// Element-wise sum over the common time range; missing if either side is.
PowerSeries build_aggregate(const PowerSeries& a, const PowerSeries& b);

/// Re-indexes `series` onto [start_time, start_time + count*period), padding with missing.
PowerSeries align_to(const PowerSeries& series, std::int64_t start_time, std::size_t count);

/// A house loaded from a low-frequency dataset directory.
struct House {
  int id = 0;
  std::vector<ChannelMeta> channels;
  PowerSeries mains;
};

std::string read_text_file(const std::filesystem::path& path);

/// Reads `<root>/house_<id>/labels.dat` and the mains channels, resampled to `period`.
House load_house(const std::filesystem::path& root, int house_id, std::int64_t period = 60);

/// Sum of every channel of `house` whose label is one of `labels`, aligned to
/// the house mains timeline. Throws DataError when no channel matches.
PowerSeries load_appliance(const std::filesystem::path& root, const House& house,
                           const std::vector<std::string>& labels, std::int64_t period = 60);

/// Writes a series as a channel file (one line per non-missing sample).
void write_channel_file(const std::filesystem::path& path, const PowerSeries& series);

}  // namespace nilm
