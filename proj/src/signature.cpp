#include "nilm/signature.hpp"

#include <algorithm>

#include "nilm/error.hpp"

namespace nilm {

std::optional<ApplianceParams> default_params(std::string_view appliance) {
  if (appliance == "refrigerator") return ApplianceParams{"refrigerator", 50.0, 60, 12};
  if (appliance == "microwave") return ApplianceParams{"microwave", 200.0, 12, 30};
  if (appliance == "dishwasher") return ApplianceParams{"dishwasher", 10.0, 1800, 1800};
  if (appliance == "washing_machine") return ApplianceParams{"washing_machine", 20.0, 1800, 160};
  return std::nullopt;
}

const std::vector<std::string>& known_appliances() {
  static const std::vector<std::string> names{"refrigerator", "microwave", "dishwasher", "washing_machine"};
  return names;
}

std::vector<std::string> dataset_labels(std::string_view appliance) {
  // "dishwaser" is the spelling used in the published label files.
  if (appliance == "dishwasher") return {"dishwaser", "dishwasher"};
  if (appliance == "washing_machine") return {"washer_dryer"};
  return {std::string(appliance)};
}

std::size_t duration_in_samples(std::int64_t seconds, std::int64_t period) {
  if (seconds <= 0) return 0;
  return static_cast<std::size_t>((seconds + period - 1) / period);
}

std::vector<std::uint8_t> on_state_labels(const PowerSeries& series, const ApplianceParams& params) {
  const auto& v = series.values;
  const std::size_t n = v.size();
  std::vector<std::uint8_t> on(n, 0);
  for (std::size_t i = 0; i < n; ++i) on[i] = (!is_missing(v[i]) && v[i] > params.on_threshold) ? 1 : 0;

  const std::size_t min_on = duration_in_samples(params.min_on, series.period);
  const std::size_t min_off = duration_in_samples(params.min_off, series.period);

  // Drop short on-runs.
  for (std::size_t i = 0; i < n;) {
    if (!on[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && on[j]) ++j;
    if (j - i < min_on) std::fill(on.begin() + static_cast<std::ptrdiff_t>(i), on.begin() + static_cast<std::ptrdiff_t>(j), 0);
    i = j;
  }
  // Bridge short off-runs between two on-runs.
  for (std::size_t i = 0; i < n;) {
    if (on[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && !on[j]) ++j;
    if (i > 0 && j < n && j - i < min_off)
      std::fill(on.begin() + static_cast<std::ptrdiff_t>(i), on.begin() + static_cast<std::ptrdiff_t>(j), 1);
    i = j;
  }
  return on;
}

std::vector<Activation> extract_activations(const PowerSeries& series, const ApplianceParams& params) {
  const auto on = on_state_labels(series, params);
  std::vector<Activation> out;
  for (std::size_t i = 0; i < on.size();) {
    if (!on[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < on.size() && on[j]) ++j;
    Activation a;
    a.start_index = i;
    a.powers.assign(series.values.begin() + static_cast<std::ptrdiff_t>(i),
                    series.values.begin() + static_cast<std::ptrdiff_t>(j));
    out.push_back(std::move(a));
    i = j;
  }
  return out;
}

std::size_t continuous_length(std::size_t length, std::size_t window) {
  if (window == 0) throw DataError("continuous_length: window must be positive");
  const std::size_t rem = length % window;
  if (2 * rem >= window) return length - rem + window;
  return length - rem;
}

std::vector<std::vector<float>> continuous_sequences(std::span<const float> section, std::size_t window) {
  const std::size_t target = continuous_length(section.size(), window);
  if (target == 0) return {};
  std::vector<float> out(target, 0.0f);
  std::copy_n(section.begin(), std::min(target, section.size()), out.begin());
  return {std::move(out)};
}

OffStats off_power_mean(const PowerSeries& series, const ApplianceParams& params) {
  const auto on = on_state_labels(series, params);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < on.size(); ++i)
    if (!on[i] && !is_missing(series.values[i])) {
      sum += series.values[i];
      ++count;
    }
  if (count == 0) throw DataError("off_power_mean: '" + params.name + "' has no off samples");
  return {sum / static_cast<double>(count)};
}

}  // namespace nilm
