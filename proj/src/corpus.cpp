#include "nilm/corpus.hpp"

#include <algorithm>
#include <cmath>

#include "nilm/error.hpp"

namespace nilm {

std::vector<Segment> make_segments(const PowerSeries& mains, const PowerSeries& appliance, std::int64_t max_gap,
                                   int house_id) {
  if (mains.period != appliance.period) throw DataError("make_segments: period mismatch");
  const PowerSeries app = align_to(appliance, mains.start_time, mains.size());
  // A sample is usable only when both signals have it.
  PowerSeries joint = mains;
  for (std::size_t i = 0; i < joint.size(); ++i)
    if (is_missing(app.values[i])) joint.values[i] = kMissing;
  std::vector<Segment> out;
  for (const auto& section : good_sections(joint, max_gap)) {
    Segment s;
    s.house_id = house_id;
    s.mains = mains.slice(section.start_index, section.length);
    s.appliance = app.slice(section.start_index, section.length);
    const GoodSection whole{0, section.length};
    forward_fill(s.mains, whole);
    forward_fill(s.appliance, whole);
    out.push_back(std::move(s));
  }
  return out;
}

std::pair<std::vector<Segment>, std::vector<Segment>> chronological_split(const std::vector<Segment>& segments,
                                                                          double fraction) {
  if (!(fraction > 0 && fraction < 1)) throw DataError("chronological_split: fraction must be in (0, 1)");
  std::size_t total = 0;
  for (const auto& s : segments) total += s.size();
  const auto cut = static_cast<std::size_t>(std::floor(static_cast<double>(total) * fraction));
  std::pair<std::vector<Segment>, std::vector<Segment>> out;
  std::size_t seen = 0;
  for (const auto& s : segments) {
    if (seen + s.size() <= cut) {
      out.first.push_back(s);
    } else if (seen >= cut) {
      out.second.push_back(s);
    } else {
      const std::size_t head = cut - seen;
      out.first.push_back({s.house_id, s.mains.slice(0, head), s.appliance.slice(0, head)});
      out.second.push_back(
          {s.house_id, s.mains.slice(head, s.size() - head), s.appliance.slice(head, s.size() - head)});
    }
    seen += s.size();
  }
  return out;
}

std::vector<Segment> fit_to_window(const std::vector<Segment>& segments, Index window) {
  if (window < 1) throw DataError("fit_to_window: window must be >= 1");
  std::vector<Segment> out;
  for (const auto& s : segments) {
    const std::size_t len = continuous_length(s.size(), static_cast<std::size_t>(window));
    if (len == 0) continue;
    Segment r = s;
    r.mains.values.resize(len, 0.0f);
    r.appliance.values.resize(len, 0.0f);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Segment> load_segments(const std::filesystem::path& root, const std::set<int>& houses,
                                   std::string_view appliance, std::int64_t period, std::int64_t max_gap) {
  std::vector<Segment> out;
  for (int id : houses) {
    const House house = load_house(root, id, period);
    const PowerSeries app = load_appliance(root, house, dataset_labels(appliance), period);
    auto segs = make_segments(house.mains, app, max_gap, id);
    out.insert(out.end(), std::make_move_iterator(segs.begin()), std::make_move_iterator(segs.end()));
  }
  return out;
}

SplitData load_split(const std::filesystem::path& root, const SplitPlan& plan, std::string_view appliance,
                     std::int64_t period, std::int64_t max_gap) {
  SplitData out;
  if (plan.mode == SplitMode::cross_house) {
    out.train = load_segments(root, plan.train_houses, appliance, period, max_gap);
    out.test = load_segments(root, plan.test_houses, appliance, period, max_gap);
  } else {
    for (int id : plan.train_houses) {
      auto [train, test] = chronological_split(load_segments(root, {id}, appliance, period, max_gap), plan.train_fraction);
      out.train.insert(out.train.end(), train.begin(), train.end());
      out.test.insert(out.test.end(), test.begin(), test.end());
    }
  }
  if (out.train.empty() || out.test.empty()) throw DataError("split leaves no training or no test data");
  return out;
}

std::vector<float> concat_mains(const std::vector<Segment>& segments) {
  std::vector<float> out;
  for (const auto& s : segments) out.insert(out.end(), s.mains.values.begin(), s.mains.values.end());
  return out;
}

std::vector<float> concat_appliance(const std::vector<Segment>& segments) {
  std::vector<float> out;
  for (const auto& s : segments) out.insert(out.end(), s.appliance.values.begin(), s.appliance.values.end());
  return out;
}

TrainingCorpus build_training_corpus(const std::vector<Segment>& segments, const ApplianceParams& params,
                                     Index window) {
  if (segments.empty()) throw DataError("no training segments");
  TrainingCorpus c;
  c.mains_scaler = fit_scaler(std::span<const float>(concat_mains(segments)));
  c.power_scaler = fit_scaler(std::span<const float>(concat_appliance(segments)));

  std::vector<std::vector<std::uint8_t>> labels;
  std::vector<std::vector<std::uint32_t>> indices;
  std::uint32_t longest = 0;
  double off_sum = 0;
  std::size_t off_count = 0;
  for (const auto& s : segments) {
    labels.push_back(on_state_labels(s.appliance, params));
    indices.push_back(run_length_index(labels.back()));
    for (auto v : indices.back()) longest = std::max(longest, v);
    for (std::size_t i = 0; i < s.size(); ++i)
      if (!labels.back()[i]) {
        off_sum += s.appliance.values[i];
        ++off_count;
      }
  }
  if (longest == 0) throw DataError("appliance '" + params.name + "' is never on in the training data");
  if (off_count == 0) throw DataError("appliance '" + params.name + "' is never off in the training data");
  c.index_scale = static_cast<double>(longest);
  c.off.off_mean = off_sum / static_cast<double>(off_count);

  c.windows.window_len = window;
  c.windows.label_offset = window / 2;
  c.windows.windows.resize(0, window);
  std::size_t offset = 0;
  std::vector<RegressorSamples> parts;
  Index rows = 0;
  for (std::size_t k = 0; k < segments.size(); ++k) {
    std::vector<float> scaled = segments[k].mains.values;
    scale_in_place(scaled, c.mains_scaler);
    c.windows.append(make_windows(scaled, labels[k], window));
    auto part = make_regressor_samples(indices[k], segments[k].appliance.values, c.power_scaler, c.index_scale);
    for (auto& p : part.positions) p += offset;
    rows += part.size();
    parts.push_back(std::move(part));
    offset += segments[k].size();
  }
  c.samples.inputs.resize(rows, kRegressorLookback);
  c.samples.targets.resize(rows);
  Index at = 0;
  for (auto& p : parts) {
    c.samples.inputs.middleRows(at, p.size()) = p.inputs;
    c.samples.targets.segment(at, p.size()) = p.targets;
    c.samples.positions.insert(c.samples.positions.end(), p.positions.begin(), p.positions.end());
    at += p.size();
  }
  return c;
}

}  // namespace nilm
