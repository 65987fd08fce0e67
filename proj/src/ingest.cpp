#include "nilm/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "nilm/error.hpp"

namespace nilm {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

/// Splits on newlines, calling fn(line_number, line) for each non-blank line.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    if (!line.empty()) fn(line_no, line);
  }
}

/// Splits "a<ws>b" into exactly two tokens.
bool split_pair(std::string_view line, std::string_view& a, std::string_view& b) {
  const auto ws = line.find_first_of(" \t");
  if (ws == std::string_view::npos) return false;
  a = line.substr(0, ws);
  b = line.substr(ws);
  const auto start = b.find_first_not_of(" \t");
  if (start == std::string_view::npos) return false;
  b = b.substr(start);
  return b.find_first_of(" \t") == std::string_view::npos;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

}  // namespace

PowerSeries PowerSeries::slice(std::size_t first, std::size_t count) const {
  if (first + count > values.size()) throw DataError("slice out of range");
  PowerSeries out{time_at(first), period, {}};
  out.values.assign(values.begin() + static_cast<std::ptrdiff_t>(first),
                    values.begin() + static_cast<std::ptrdiff_t>(first + count));
  return out;
}

std::vector<ChannelMeta> parse_labels(std::string_view text, int house_id) {
  std::vector<ChannelMeta> metas;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    std::string_view id, label;
    int channel = 0;
    if (!split_pair(line, id, label) || !parse_number(id, channel))
      throw ParseError("expected '<channel> <label>', got '" + std::string(line) + "'", line_no);
    for (const auto& m : metas)
      if (m.channel_id == channel) throw ParseError("duplicate channel " + std::to_string(channel), line_no);
    metas.push_back({house_id, channel, std::string(label)});
  });
  return metas;
}

std::vector<Reading> parse_channel(std::string_view text) {
  std::vector<Reading> out;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    std::string_view ts, w;
    Reading r{};
    if (!split_pair(line, ts, w) || !parse_number(ts, r.time) || !parse_number(w, r.watts))
      throw ParseError("expected '<unix_seconds> <watts>', got '" + std::string(line) + "'", line_no);
    if (!out.empty() && r.time <= out.back().time)
      throw ParseError("timestamp " + std::to_string(r.time) + " not after " + std::to_string(out.back().time),
                       line_no);
    out.push_back(r);
  });
  return out;
}

std::string format_channel(const std::vector<Reading>& readings) {
  std::string out;
  out.reserve(readings.size() * 20);
  char buf[64];
  for (const auto& r : readings) {
    auto res = std::to_chars(buf, buf + sizeof buf, r.time);
    out.append(buf, res.ptr);
    out.push_back(' ');
    res = std::to_chars(buf, buf + sizeof buf, r.watts);
    out.append(buf, res.ptr);
    out.push_back('\n');
  }
  return out;
}

PowerSeries resample_mean(const std::vector<Reading>& readings, std::int64_t period) {
  if (readings.empty()) throw DataError("resample_mean: no readings");
  if (period <= 0) throw DataError("resample_mean: period must be positive");
  const std::int64_t start = floor_div(readings.front().time, period) * period;
  const auto buckets = static_cast<std::size_t>(floor_div(readings.back().time - start, period) + 1);
  std::vector<double> sum(buckets, 0.0);
  std::vector<std::uint32_t> count(buckets, 0);
  for (const auto& r : readings) {
    const auto k = static_cast<std::size_t>(floor_div(r.time - start, period));
    sum[k] += r.watts;
    ++count[k];
  }
  PowerSeries out{start, period, std::vector<float>(buckets, kMissing)};
  for (std::size_t k = 0; k < buckets; ++k)
    if (count[k] > 0) out.values[k] = static_cast<float>(sum[k] / count[k]);
  return out;
}

std::vector<GoodSection> good_sections(const PowerSeries& series, std::int64_t max_gap) {
  if (max_gap < series.period) throw DataError("good_sections: max_gap must be at least the period");
  const std::size_t bridgeable = static_cast<std::size_t>(max_gap / series.period);
  std::vector<GoodSection> out;
  const auto& v = series.values;
  std::size_t i = 0;
  while (i < v.size() && is_missing(v[i])) ++i;
  while (i < v.size()) {
    const std::size_t start = i;
    std::size_t last = i;
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      if (is_missing(v[j])) continue;
      if (j - last > bridgeable) break;
      last = j;
    }
    out.push_back({start, last - start + 1});
    i = last + 1;
    while (i < v.size() && is_missing(v[i])) ++i;
  }
  return out;
}

void forward_fill(PowerSeries& series, const GoodSection& section) {
  float prev = kMissing;
  for (std::size_t i = section.start_index; i < section.start_index + section.length; ++i) {
    if (is_missing(series.values[i]))
      series.values[i] = prev;
    else
      prev = series.values[i];
  }
}

PowerSeries build_aggregate(const PowerSeries& a, const PowerSeries& b) {
  if (a.period != b.period) throw DataError("build_aggregate: period mismatch");
  if ((a.start_time - b.start_time) % a.period != 0) throw DataError("build_aggregate: grids are not aligned");
  const std::int64_t start = std::max(a.start_time, b.start_time);
  const std::int64_t end = std::min(a.end_time(), b.end_time());
  if (end <= start) throw DataError("build_aggregate: series do not overlap");
  const auto n = static_cast<std::size_t>((end - start) / a.period);
  const auto oa = static_cast<std::size_t>((start - a.start_time) / a.period);
  const auto ob = static_cast<std::size_t>((start - b.start_time) / b.period);
  PowerSeries out{start, a.period, std::vector<float>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const float x = a.values[oa + i], y = b.values[ob + i];
    out.values[i] = (is_missing(x) || is_missing(y)) ? kMissing : x + y;
  }
  return out;
}

PowerSeries align_to(const PowerSeries& series, std::int64_t start_time, std::size_t count) {
  if ((series.start_time - start_time) % series.period != 0) throw DataError("align_to: grids are not aligned");
  PowerSeries out{start_time, series.period, std::vector<float>(count, kMissing)};
  for (std::size_t i = 0; i < series.size(); ++i) {
    const std::int64_t k = (series.time_at(i) - start_time) / series.period;
    if (k >= 0 && k < static_cast<std::int64_t>(count)) out.values[static_cast<std::size_t>(k)] = series.values[i];
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

PowerSeries load_channel(const std::filesystem::path& dir, int channel, std::int64_t period) {
  const auto path = dir / ("channel_" + std::to_string(channel) + ".dat");
  try {
    return resample_mean(parse_channel(read_text_file(path)), period);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

PowerSeries sum_aligned(const PowerSeries& a, const PowerSeries& b) {
  PowerSeries out = a;
  const PowerSeries bb = align_to(b, a.start_time, a.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const float x = out.values[i], y = bb.values[i];
    out.values[i] = (is_missing(x) || is_missing(y)) ? kMissing : x + y;
  }
  return out;
}

}  // namespace

House load_house(const std::filesystem::path& root, int house_id, std::int64_t period) {
  const auto dir = root / ("house_" + std::to_string(house_id));
  House house;
  house.id = house_id;
  house.channels = parse_labels(read_text_file(dir / "labels.dat"), house_id);
  std::vector<PowerSeries> mains;
  for (const auto& c : house.channels)
    if (c.label == "mains") mains.push_back(load_channel(dir, c.channel_id, period));
  if (mains.empty()) throw DataError(dir.string() + ": no mains channel in labels.dat");
  house.mains = mains.front();
  for (std::size_t i = 1; i < mains.size(); ++i) house.mains = build_aggregate(house.mains, mains[i]);
  return house;
}

PowerSeries load_appliance(const std::filesystem::path& root, const House& house,
                           const std::vector<std::string>& labels, std::int64_t period) {
  const auto dir = root / ("house_" + std::to_string(house.id));
  std::vector<PowerSeries> parts;
  for (const auto& c : house.channels)
    if (std::find(labels.begin(), labels.end(), c.label) != labels.end())
      parts.push_back(align_to(load_channel(dir, c.channel_id, period), house.mains.start_time, house.mains.size()));
  if (parts.empty()) throw DataError("house " + std::to_string(house.id) + " has no channel for the appliance");
  PowerSeries out = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) out = sum_aligned(out, parts[i]);
  return out;
}

void write_channel_file(const std::filesystem::path& path, const PowerSeries& series) {
  std::vector<Reading> readings;
  readings.reserve(series.size());
  for (std::size_t i = 0; i < series.size(); ++i)
    if (!is_missing(series.values[i])) readings.push_back({series.time_at(i), static_cast<double>(series.values[i])});
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << format_channel(readings);
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace nilm
