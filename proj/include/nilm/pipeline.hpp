#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nilm/corpus.hpp"
#include "nilm/eval.hpp"
#include "nilm/ingest.hpp"
#include "nilm/models.hpp"
#include "nilm/train.hpp"

namespace nilm {

struct ApplianceTrace {
  std::string appliance;
  std::vector<std::uint8_t> states;
  std::vector<std::uint32_t> indices;
  std::vector<float> power;  // watts
};

struct DisaggregationResult {
  std::int64_t start_time = 0;
  std::int64_t period = 60;
  std::vector<float> mains;
  std::vector<ApplianceTrace> appliances;

  std::size_t size() const { return mains.size(); }
};

/// Classifies every mains sample, indexes the predicted on-runs and retrieves
/// power from the regressor; off samples get the bundle's off mean.
ApplianceTrace disaggregate_one(const PowerSeries& mains, const ModelBundle& bundle);

DisaggregationResult disaggregate(const PowerSeries& mains, const ModelBundle& bundle);
DisaggregationResult disaggregate(const PowerSeries& mains, std::span<const ModelBundle> bundles);

/// "timestamp,mains,<app>_pred[,<app>_true]..." with one row per sample.
/// `truth`, when given, is parallel to `result.appliances`.
std::string export_csv(const DisaggregationResult& result, const std::vector<PowerSeries>* truth = nullptr);

struct TrainOptions {
  Index window = kDefaultWindow;
  TrainConfig classifier;
  TrainConfig regressor;
};

struct TrainOutcome {
  ModelBundle bundle;
  TrainReport classifier_report;
  TrainReport regressor_report;
};

/// Fits scalers, trains both networks on `segments` and assembles the bundle.
TrainOutcome train_bundle(const std::vector<Segment>& segments, const ApplianceParams& params,
                          const TrainOptions& options);

/// Disaggregates each test segment and scores states against the labelled
/// truth and power against the metered appliance trace.
EvalReport evaluate_bundle(const ModelBundle& bundle, const std::vector<Segment>& segments, std::string split);

}  // namespace nilm
