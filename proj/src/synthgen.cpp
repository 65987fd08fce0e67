#include "nilm/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "nilm/error.hpp"
#include "nilm/rng.hpp"

namespace nilm {

namespace {

std::size_t jittered(Rng& rng, double mean, double fraction) {
  const double v = mean * rng.uniform(1.0 - fraction, 1.0 + fraction);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(v)));
}

std::size_t exponential(Rng& rng, double mean) {
  double u;
  do {
    u = rng.uniform();
  } while (u <= 0.0);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(-mean * std::log(u))));
}

double run_power(const ApplianceProfile& p, double base, std::size_t k) {
  return std::max(base - p.decay_per_step * static_cast<double>(k), base / 2.0);
}

void fill_on(std::vector<float>& out, std::size_t at, std::size_t len, const ApplianceProfile& p, double base,
             std::size_t k0 = 0) {
  for (std::size_t k = 0; k < len && at + k < out.size(); ++k)
    out[at + k] = static_cast<float>(run_power(p, base, k0 + k));
}

std::vector<float> simulate_appliance(const ApplianceProfile& p, std::size_t n, Rng& rng) {
  std::vector<float> out(n, 0.0f);
  if (p.mean_on < 1 || p.mean_off < 1) throw DataError("profile '" + p.name + "': durations must be >= 1 sample");
  if (p.on_power <= 0) throw DataError("profile '" + p.name + "': on_power must be positive");
  switch (p.pattern) {
    case DutyPattern::periodic: {
      // Random phase so that houses with the same profile are not synchronised.
      std::size_t t = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(p.mean_on + p.mean_off)));
      while (t < n) {
        const std::size_t on = jittered(rng, p.mean_on, 0.2);
        fill_on(out, t, on, p, p.on_power);
        t += on + jittered(rng, p.mean_off, 0.2);
      }
      break;
    }
    case DutyPattern::bursty: {
      const auto lo = std::max<std::int64_t>(1, std::llround(p.mean_on * 0.5));
      const auto hi = std::max<std::int64_t>(lo, std::llround(p.mean_on * 1.5));
      std::size_t t = exponential(rng, p.mean_off);
      while (t < n) {
        const auto on = static_cast<std::size_t>(lo + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(hi - lo + 1))));
        fill_on(out, t, on, p, p.on_power);
        t += on + exponential(rng, p.mean_off);
      }
      break;
    }
    case DutyPattern::multi_state: {
      if (p.plateaus.empty()) throw DataError("profile '" + p.name + "': multi_state needs plateaus");
      std::size_t t = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(p.mean_off)));
      while (t < n) {
        for (const auto& [watts, samples] : p.plateaus) {
          const int j = p.plateau_jitter > 0
                            ? static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * p.plateau_jitter + 1))) -
                                  p.plateau_jitter
                            : 0;
          const auto len = static_cast<std::size_t>(std::max(1, samples + j));
          for (std::size_t k = 0; k < len && t + k < n; ++k) out[t + k] = static_cast<float>(watts);
          t += len;
        }
        t += jittered(rng, p.mean_off, 0.3);
      }
      break;
    }
  }
  return out;
}

}  // namespace

ApplianceProfile fridge_profile() {
  return {"refrigerator", DutyPattern::periodic, 150.0, 2.0, 15.0, 30.0, {}, 0};
}

ApplianceProfile microwave_profile() {
  return {"microwave", DutyPattern::bursty, 1500.0, 0.0, 1.5, 240.0, {}, 0};
}

ApplianceProfile dishwasher_profile() {
  return {"dishwasher", DutyPattern::multi_state, 200.0, 0.0, 90.0, 1440.0, {{200.0, 20}, {700.0, 30}, {250.0, 40}}, 2};
}

SimHouse default_house(std::size_t days, std::uint64_t seed) {
  SimHouse h;
  h.base_load = 80.0;
  h.noise_std = 8.0;
  h.profiles = {fridge_profile(), microwave_profile(), dishwasher_profile()};
  h.duration = days * 1440;
  h.seed = seed;
  return h;
}

SimResult simulate_house(const SimHouse& config) {
  if (config.duration < 1) throw DataError("simulate_house: duration must be >= 1");
  if (config.base_load < 0 || config.noise_std < 0) throw DataError("simulate_house: negative base load or noise");
  const std::size_t n = config.duration;
  SimResult r;
  r.mains = PowerSeries{config.start_time, config.period, std::vector<float>(n, 0.0f)};
  std::vector<double> total(n, config.base_load);
  for (std::size_t i = 0; i < config.profiles.size(); ++i) {
    Rng rng(config.seed * 0x9E3779B97F4A7C15ULL + 0x1000 + i);
    auto values = simulate_appliance(config.profiles[i], n, rng);
    for (std::size_t t = 0; t < n; ++t) total[t] += values[t];
    r.appliances.push_back(PowerSeries{config.start_time, config.period, std::move(values)});
  }
  Rng noise(config.seed * 0x9E3779B97F4A7C15ULL + 0x2000 + config.profiles.size());
  for (std::size_t t = 0; t < n; ++t) {
    const double v = config.noise_std > 0 ? total[t] + noise.normal(0.0, config.noise_std) : total[t];
    r.mains.values[t] = static_cast<float>(std::max(v, 0.0));
  }
  return r;
}

void write_dataset_layout(const std::filesystem::path& root, int house_id, const SimHouse& config,
                          const SimResult& result) {
  const auto dir = root / ("house_" + std::to_string(house_id));
  std::filesystem::create_directories(dir);
  std::ofstream labels(dir / "labels.dat");
  if (!labels) throw DataError("cannot write " + (dir / "labels.dat").string());
  labels << "1 mains\n2 mains\n";
  for (std::size_t i = 0; i < config.profiles.size(); ++i) labels << (i + 3) << ' ' << config.profiles[i].name << '\n';
  write_channel_file(dir / "channel_1.dat", result.mains);
  PowerSeries phase_b{result.mains.start_time, result.mains.period, std::vector<float>(result.mains.size(), 0.0f)};
  write_channel_file(dir / "channel_2.dat", phase_b);
  for (std::size_t i = 0; i < result.appliances.size(); ++i)
    write_channel_file(dir / ("channel_" + std::to_string(i + 3) + ".dat"), result.appliances[i]);
}

}  // namespace nilm
