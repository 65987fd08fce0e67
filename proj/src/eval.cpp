#include "nilm/eval.hpp"

#include <cmath>
#include <cstdio>

#include "nilm/error.hpp"

namespace nilm {

namespace {

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ClassificationResult classification_metrics(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> truth) {
  if (pred.size() != truth.size())
    throw DataError("classification_metrics: " + std::to_string(pred.size()) + " predictions vs " +
                    std::to_string(truth.size()) + " labels");
  if (pred.empty()) throw DataError("classification_metrics: empty input");
  ClassificationResult r;
  auto& c = r.counts;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred[i] != 0, t = truth[i] != 0;
    if (p && t)
      ++c.tp;
    else if (p)
      ++c.fp;
    else if (t)
      ++c.fn;
    else
      ++c.tn;
  }
  auto& m = r.report;
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  m.f1 = (m.precision + m.recall) > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  m.accuracy = ratio(c.tp + c.tn, c.total());
  return r;
}

RegressionReport regression_metrics(std::span<const float> pred, std::span<const float> truth) {
  if (pred.size() != truth.size())
    throw DataError("regression_metrics: " + std::to_string(pred.size()) + " predictions vs " +
                    std::to_string(truth.size()) + " targets");
  if (pred.empty()) throw DataError("regression_metrics: empty input");
  double abs_sum = 0, sq_sum = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = static_cast<double>(pred[i]) - static_cast<double>(truth[i]);
    abs_sum += std::abs(d);
    sq_sum += d * d;
  }
  const auto n = static_cast<double>(pred.size());
  return {abs_sum / n, sq_sum / n};
}

std::string to_csv_row(const EvalReport& r) {
  const auto& c = r.classification.report;
  char buf[256];
  std::snprintf(buf, sizeof buf, ",%.4f,%.4f,%.4f,%.4f,%.3f,%.3f", c.precision, c.recall, c.f1, c.accuracy,
                r.regression.mae, r.regression.mse);
  return r.appliance + "," + r.split + buf;
}

}  // namespace nilm
