#include "nilm/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "nilm/error.hpp"
#include "nilm/features.hpp"

namespace nilm {

namespace {

constexpr Index kChunk = 4096;

void check_mains(const PowerSeries& mains, const ModelBundle& bundle) {
  if (mains.empty()) throw DataError("disaggregate: empty mains");
  if (mains.period != bundle.period)
    throw DataError("disaggregate: mains period " + std::to_string(mains.period) + " s, bundle '" +
                    bundle.appliance + "' expects " + std::to_string(bundle.period) + " s");
  for (std::size_t i = 0; i < mains.size(); ++i)
    if (!std::isfinite(mains.values[i]))
      throw DataError("disaggregate: non-finite mains value at sample " + std::to_string(i));
  if (bundle.classifier.empty() || bundle.regressor.empty())
    throw DataError("disaggregate: bundle '" + bundle.appliance + "' has no trained networks");
}

}  // namespace

ApplianceTrace disaggregate_one(const PowerSeries& mains, const ModelBundle& bundle) {
  check_mains(mains, bundle);
  ApplianceTrace trace;
  trace.appliance = bundle.appliance;

  std::vector<float> scaled = mains.values;
  scale_in_place(scaled, bundle.mains_scaler);
  const WindowSet windows = make_windows(scaled, {}, bundle.window());
  trace.states = predict_states(bundle.classifier, windows);
  trace.indices = run_length_index(trace.states);

  const std::size_t n = mains.size();
  trace.power.assign(n, static_cast<float>(bundle.off.off_mean));
  std::vector<std::size_t> on;
  for (std::size_t t = 0; t < n; ++t)
    if (trace.states[t]) on.push_back(t);
  for (std::size_t first = 0; first < on.size(); first += kChunk) {
    const auto count = static_cast<Index>(std::min<std::size_t>(kChunk, on.size() - first));
    MatrixXf rows(count, kRegressorLookback);
    for (Index r = 0; r < count; ++r)
      lookback_row(trace.indices, on[first + static_cast<std::size_t>(r)], bundle.index_scale, rows.row(r));
    nn::Tensor<float> x(kRegressorLookback, 1, count);
    for (Index t = 0; t < kRegressorLookback; ++t) x[t] = rows.col(t).transpose();
    const auto y = bundle.regressor.forward(x);
    for (Index r = 0; r < count; ++r) {
      const double watts = scale(static_cast<double>(y[0](0, r)), bundle.power_scaler, Direction::inverse);
      trace.power[on[first + static_cast<std::size_t>(r)]] = static_cast<float>(std::max(watts, 0.0));
    }
  }
  return trace;
}

DisaggregationResult disaggregate(const PowerSeries& mains, const ModelBundle& bundle) {
  return disaggregate(mains, std::span<const ModelBundle>(&bundle, 1));
}

DisaggregationResult disaggregate(const PowerSeries& mains, std::span<const ModelBundle> bundles) {
  DisaggregationResult r;
  r.start_time = mains.start_time;
  r.period = mains.period;
  r.mains = mains.values;
  for (const auto& b : bundles) r.appliances.push_back(disaggregate_one(mains, b));
  return r;
}

std::string export_csv(const DisaggregationResult& result, const std::vector<PowerSeries>* truth) {
  const std::size_t n = result.size();
  if (truth) {
    if (truth->size() != result.appliances.size())
      throw DataError("export_csv: " + std::to_string(truth->size()) + " truth series for " +
                      std::to_string(result.appliances.size()) + " appliances");
    for (const auto& t : *truth)
      if (t.size() != n || t.start_time != result.start_time || t.period != result.period)
        throw DataError("export_csv: truth series is not aligned with the mains");
  }
  for (const auto& a : result.appliances)
    if (a.power.size() != n) throw DataError("export_csv: appliance trace length differs from mains");

  std::string out = "timestamp,mains";
  for (const auto& a : result.appliances) {
    out += "," + a.appliance + "_pred";
    if (truth) out += "," + a.appliance + "_true";
  }
  out += '\n';
  char buf[64];
  for (std::size_t i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "%lld,%.1f", static_cast<long long>(result.start_time + static_cast<std::int64_t>(i) * result.period),
                  static_cast<double>(result.mains[i]));
    out += buf;
    for (std::size_t k = 0; k < result.appliances.size(); ++k) {
      std::snprintf(buf, sizeof buf, ",%.1f", static_cast<double>(result.appliances[k].power[i]));
      out += buf;
      if (truth) {
        std::snprintf(buf, sizeof buf, ",%.1f", static_cast<double>((*truth)[k].values[i]));
        out += buf;
      }
    }
    out += '\n';
  }
  return out;
}

TrainOutcome train_bundle(const std::vector<Segment>& segments, const ApplianceParams& params,
                          const TrainOptions& options) {
  const auto fitted = fit_to_window(segments, options.window);
  if (fitted.empty()) throw DataError("no training segment is long enough for the window");
  const TrainingCorpus corpus = build_training_corpus(fitted, params, options.window);

  TrainOutcome out;
  auto classifier = train_classifier(corpus.windows, options.classifier);
  auto regressor = train_regressor(corpus.samples, options.regressor);
  out.classifier_report = std::move(classifier.report);
  out.regressor_report = std::move(regressor.report);

  ModelBundle& b = out.bundle;
  b.appliance = params.name;
  b.classifier = std::move(classifier.network);
  b.regressor = std::move(regressor.network);
  b.mains_scaler = corpus.mains_scaler;
  b.power_scaler = corpus.power_scaler;
  b.index_scale = corpus.index_scale;
  b.params = params;
  b.off = corpus.off;
  b.period = fitted.front().mains.period;
  check_param_budget(b);
  return out;
}

EvalReport evaluate_bundle(const ModelBundle& bundle, const std::vector<Segment>& segments, std::string split) {
  std::vector<std::uint8_t> pred_states, true_states;
  std::vector<float> pred_power, true_power;
  for (const auto& s : segments) {
    const auto trace = disaggregate_one(s.mains, bundle);
    const auto truth = on_state_labels(s.appliance, bundle.params);
    pred_states.insert(pred_states.end(), trace.states.begin(), trace.states.end());
    true_states.insert(true_states.end(), truth.begin(), truth.end());
    pred_power.insert(pred_power.end(), trace.power.begin(), trace.power.end());
    true_power.insert(true_power.end(), s.appliance.values.begin(), s.appliance.values.end());
  }
  if (pred_states.empty()) throw DataError("evaluate_bundle: no test samples");
  EvalReport r;
  r.appliance = bundle.appliance;
  r.split = std::move(split);
  r.classification = classification_metrics(pred_states, true_states);
  r.regression = regression_metrics(pred_power, true_power);
  return r;
}

}  // namespace nilm
