#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nilm/ingest.hpp"

namespace nilm {

/// On/off detection parameters for one appliance. Durations are seconds.
struct ApplianceParams {
  std::string name;
  double on_threshold = 10.0;
  std::int64_t min_on = 0;
  std::int64_t min_off = 0;
  friend bool operator==(const ApplianceParams&, const ApplianceParams&) = default;
};

/// Built-in parameters for refrigerator, microwave, dishwasher, washing_machine.
std::optional<ApplianceParams> default_params(std::string_view appliance);

/// Names with built-in parameters, in a fixed order.
const std::vector<std::string>& known_appliances();

/// Channel labels that carry `appliance` in the low-frequency dataset layout.
std::vector<std::string> dataset_labels(std::string_view appliance);

/// Seconds to whole samples, rounding up.
std::size_t duration_in_samples(std::int64_t seconds, std::int64_t period);

struct Activation {
  std::size_t start_index = 0;
  std::vector<float> powers;
};

struct OffStats {
  double off_mean = 0.0;
};

/// 1 where power > on_threshold; then on-runs shorter than min_on become 0,
/// then interior off-runs shorter than min_off become 1. Missing samples are off.
std::vector<std::uint8_t> on_state_labels(const PowerSeries& series, const ApplianceParams& params);

/// One activation per maximal run of on-labels.
std::vector<Activation> extract_activations(const PowerSeries& series, const ApplianceParams& params);

/// Target length for a section of `length` samples: pad up to the next
/// multiple of `window` when the remainder is at least half a window,
/// otherwise truncate. 0 means the section is dropped.
std::size_t continuous_length(std::size_t length, std::size_t window);

/// The section resized per continuous_length (zero padded). Empty when dropped.
std::vector<std::vector<float>> continuous_sequences(std::span<const float> section, std::size_t window);

/// Mean power over off-labelled samples. Throws DataError when there are none.
OffStats off_power_mean(const PowerSeries& series, const ApplianceParams& params);

}  // namespace nilm
