#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "nilm/ingest.hpp"

namespace nilm {

enum class DutyPattern { periodic, bursty, multi_state };

/// Generative description of one appliance. Durations are in samples.
///
/// - periodic: alternating on/off runs, each within +-20% of its mean.
/// - bursty: off gaps drawn exponentially around `mean_off`; on runs uniform
///   in [round(mean_on/2), round(3*mean_on/2)].
/// - multi_state: each activation walks `plateaus` (watts, samples) in order,
///   every plateau length jittered by up to +-`plateau_jitter` samples; off
///   gaps within +-30% of `mean_off`.
///
/// While on, power at step k of a run is max(on_power - decay_per_step * k, on_power / 2).
struct ApplianceProfile {
  std::string name;
  DutyPattern pattern = DutyPattern::periodic;
  double on_power = 100.0;
  double decay_per_step = 0.0;
  double mean_on = 10.0;
  double mean_off = 10.0;
  std::vector<std::pair<double, int>> plateaus;
  int plateau_jitter = 0;
};

struct SimHouse {
  double base_load = 100.0;
  double noise_std = 0.0;
  std::vector<ApplianceProfile> profiles;
  std::size_t duration = 1440;
  std::uint64_t seed = 0;
  std::int64_t period = 60;
  std::int64_t start_time = 1303132920;
};

struct SimResult {
  PowerSeries mains;
  std::vector<PowerSeries> appliances;  // parallel to SimHouse::profiles
};

/// 150 W decaying 2 W/sample, ~15 samples on, ~30 off.
ApplianceProfile fridge_profile();
/// 1500 W bursts of 1-2 samples, a few per day.
ApplianceProfile microwave_profile();
/// 200 W, 700 W, 250 W plateaus, about once a day.
ApplianceProfile dishwasher_profile();

/// The three shipped profiles over `days` of 1-minute samples.
SimHouse default_house(std::size_t days, std::uint64_t seed);

/// mains = base_load + sum(appliances) + N(0, noise_std), clamped at 0.
/// Each appliance draws from its own stream derived from `seed`, so adding a
/// profile does not perturb the others.
SimResult simulate_house(const SimHouse& config);

/// Writes `<root>/house_<id>/labels.dat` and channel files: channel 1 holds the
/// full mains, channel 2 is a 0 W second phase, channels 3.. the appliances.
void write_dataset_layout(const std::filesystem::path& root, int house_id, const SimHouse& config,
                          const SimResult& result);

}  // namespace nilm
