#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace nilm {

struct ConfusionCounts {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
  std::uint64_t total() const { return tp + fp + fn + tn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct ClassificationReport {
  double precision = 0, recall = 0, f1 = 0, accuracy = 0;
};

struct RegressionReport {
  double mae = 0, mse = 0;
};

struct ClassificationResult {
  ConfusionCounts counts;
  ClassificationReport report;
};

/// Standard precision = tp/(tp+fp), recall = tp/(tp+fn); undefined ratios are 0.
ClassificationResult classification_metrics(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> truth);

/// MAE and MSE in the units of the inputs.
RegressionReport regression_metrics(std::span<const float> pred, std::span<const float> truth);

/// One metrics row: appliance, split, precision, recall, f1, accuracy, mae, mse.
struct EvalReport {
  std::string appliance;
  std::string split;
  ClassificationResult classification;
  RegressionReport regression;
};

inline constexpr const char* kEvalCsvHeader = "appliance,split,precision,recall,f1,accuracy,mae,mse";

std::string to_csv_row(const EvalReport& r);

}  // namespace nilm
