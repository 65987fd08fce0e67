#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nilm/features.hpp"
#include "nilm/ingest.hpp"
#include "nilm/signature.hpp"
#include "nilm/train.hpp"

namespace nilm {

/// Longest tolerated run of missing samples inside a section, in seconds.
inline constexpr std::int64_t kDefaultMaxGap = 180;

/// A gap-free stretch of mains with the matching appliance trace.
struct Segment {
  int house_id = 0;
  PowerSeries mains;
  PowerSeries appliance;

  std::size_t size() const { return mains.size(); }
};

/// Sections where both signals are usable, forward-filled inside.
std::vector<Segment> make_segments(const PowerSeries& mains, const PowerSeries& appliance,
                                   std::int64_t max_gap = kDefaultMaxGap, int house_id = 0);

/// Chronological cut: the first `fraction` of all samples (in segment order)
/// goes to the first list. A segment straddling the cut is split in two.
std::pair<std::vector<Segment>, std::vector<Segment>> chronological_split(const std::vector<Segment>& segments,
                                                                          double fraction);

/// Each segment resized per continuous_length (both signals zero padded or
/// truncated together). Segments that would be dropped are removed.
std::vector<Segment> fit_to_window(const std::vector<Segment>& segments, Index window);

/// Loads every house in `houses` and returns its segments for `appliance`.
std::vector<Segment> load_segments(const std::filesystem::path& root, const std::set<int>& houses,
                                   std::string_view appliance, std::int64_t period = 60,
                                   std::int64_t max_gap = kDefaultMaxGap);

struct SplitData {
  std::vector<Segment> train;
  std::vector<Segment> test;
};

/// Same-house plans cut every house chronologically at `plan.train_fraction`;
/// cross-house plans load the train and test houses whole.
SplitData load_split(const std::filesystem::path& root, const SplitPlan& plan, std::string_view appliance,
                     std::int64_t period = 60, std::int64_t max_gap = kDefaultMaxGap);

/// Concatenation of one signal over all segments.
std::vector<float> concat_mains(const std::vector<Segment>& segments);
std::vector<float> concat_appliance(const std::vector<Segment>& segments);

/// Windows and regressor samples for one appliance over training segments.
struct TrainingCorpus {
  WindowSet windows;
  RegressorSamples samples;
  Scaler mains_scaler;
  Scaler power_scaler;
  double index_scale = 1.0;
  OffStats off;
};

/// Fits the scalers on `segments`, labels with `params` and builds the
/// classifier windows and regressor samples.
///
/// - mains scaler: min/max of the mains.
/// - power scaler: min/max of the appliance power, off samples included.
/// - index scale: longest on-run.
/// - off mean: mean appliance power over off labels.
TrainingCorpus build_training_corpus(const std::vector<Segment>& segments, const ApplianceParams& params,
                                     Index window);

}  // namespace nilm
