#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "nilm/pipeline.hpp"
#include "nilm/signature.hpp"

namespace nilm {

/// Experiment settings read from an INI file:
///
///   [train]            window, step_size, batch_size, max_epochs, patience,
///                      seed, balance, validation_fraction, min_batches_per_epoch
///   [data]             period, max_gap, train_fraction
///   [<appliance>]      on_threshold, min_on, min_off
///
/// Missing keys keep their defaults.
struct Config {
  TrainOptions train;
  std::int64_t period = 60;
  std::int64_t max_gap = kDefaultMaxGap;
  double train_fraction = 0.70;
  std::vector<ApplianceParams> appliances;

  /// Built-in parameters overridden by any matching section.
  ApplianceParams appliance(std::string_view name) const;
};

Config default_config();
Config parse_config(std::string_view text);
Config load_config(const std::filesystem::path& path);

}  // namespace nilm
