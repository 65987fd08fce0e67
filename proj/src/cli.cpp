#include "nilm/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nilm/bundle.hpp"
#include "nilm/config.hpp"
#include "nilm/corpus.hpp"
#include "nilm/error.hpp"
#include "nilm/eval.hpp"
#include "nilm/pipeline.hpp"
#include "nilm/synthgen.hpp"
#include "nilm/train.hpp"

namespace nilm::cli {

namespace {

struct Options {
  std::string data;
  std::string config;
  std::optional<std::uint64_t> seed;

  std::vector<int> houses;
  int house = 0;
  std::string appliance;
  std::string mode = "same-house";
  std::string out;
  std::vector<std::string> bundles;

  std::size_t days = 16;
  std::optional<int> epochs;
  std::optional<Index> window;
  bool truth = false;
  std::size_t first = 0;
  std::optional<std::size_t> count;
  std::string format = "json";
};

std::filesystem::path data_dir(const Options& o) {
  if (!o.data.empty()) return o.data;
  if (const char* env = std::getenv("NILM_DATA_DIR"); env && *env) return env;
  throw DataError("no data directory: pass --data or set NILM_DATA_DIR");
}

Config effective_config(const Options& o) {
  Config c = o.config.empty() ? default_config() : load_config(o.config);
  if (o.seed) c.train.classifier.seed = c.train.regressor.seed = *o.seed;
  if (o.epochs) c.train.classifier.max_epochs = c.train.regressor.max_epochs = *o.epochs;
  if (o.window) c.train.window = *o.window;
  return c;
}

SplitPlan plan_for(const Options& o, const Config& c, std::string_view appliance) {
  std::set<int> houses(o.houses.begin(), o.houses.end());
  if (houses.empty()) houses = {1};
  SplitPlan plan = make_split(appliance, parse_split_mode(o.mode), houses);
  plan.train_fraction = c.train_fraction;
  return plan;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write " + path.string());
  f << text;
  if (!f) throw DataError("write failed: " + path.string());
}

void emit(const Options& o, const std::string& text, std::ostream& out) {
  if (o.out.empty() || o.out == "-")
    out << text;
  else
    write_file(o.out, text);
}

int do_stats(const Options& o, std::ostream& out) {
  const Config c = effective_config(o);
  const auto root = data_dir(o);
  const House house = load_house(root, o.house, c.period);
  std::size_t missing = 0;
  for (float v : house.mains.values) missing += is_missing(v) ? 1 : 0;
  const auto sections = good_sections(house.mains, c.max_gap);
  std::size_t longest = 0, covered = 0;
  for (const auto& s : sections) {
    longest = std::max(longest, s.length);
    covered += s.length;
  }
  out << "house: " << house.id << "\n"
      << "channels: " << house.channels.size() << "\n"
      << "mains_samples: " << house.mains.size() << "\n"
      << "mains_missing: " << missing << "\n"
      << "sections: " << sections.size() << "\n"
      << "section_samples: " << covered << "\n"
      << "longest_section: " << longest << "\n";
  for (const auto& name : known_appliances()) {
    PowerSeries app;
    try {
      app = load_appliance(root, house, dataset_labels(name), c.period);
    } catch (const DataError&) {
      continue;
    }
    out << name << "_activations: " << extract_activations(app, c.appliance(name)).size() << "\n";
  }
  return ok;
}

int do_simulate(const Options& o, std::ostream& out) {
  if (o.out.empty()) throw DataError("simulate needs --out");
  const std::uint64_t seed = o.seed.value_or(0);
  std::vector<int> houses = o.houses.empty() ? std::vector<int>{1} : o.houses;
  for (int id : houses) {
    const SimHouse config = default_house(o.days, seed + static_cast<std::uint64_t>(id));
    write_dataset_layout(o.out, id, config, simulate_house(config));
    out << "house_" << id << ": " << config.duration << " samples, " << config.profiles.size() << " appliances\n";
  }
  return ok;
}

int do_train(const Options& o, std::ostream& out, std::ostream& err) {
  const Config c = effective_config(o);
  const ApplianceParams params = c.appliance(o.appliance);
  const SplitPlan plan = plan_for(o, c, o.appliance);
  const SplitData split = load_split(data_dir(o), plan, o.appliance, c.period, c.max_gap);
  err << "training " << o.appliance << " (" << to_string(plan.mode) << ") on " << split.train.size()
      << " segments\n";
  const TrainOutcome result = train_bundle(split.train, params, c.train);

  std::filesystem::path path = o.out.empty() ? std::filesystem::path(o.appliance + ".nilm") : std::filesystem::path(o.out);
  const auto bytes = save_bundle(result.bundle, path);
  auto report_path = [&](const char* which) {
    auto p = path;
    return p.replace_extension(std::string(".") + which + ".csv");
  };
  write_file(report_path("classifier"), result.classifier_report.to_csv());
  write_file(report_path("regressor"), result.regressor_report.to_csv());
  out << path.string() << ": " << bytes << " bytes, " << result.bundle.param_count() << " parameters, classifier epoch "
      << result.classifier_report.best_epoch << ", regressor epoch " << result.regressor_report.best_epoch << "\n";
  return ok;
}

int do_eval(const Options& o, std::ostream& out) {
  const Config c = effective_config(o);
  std::string csv = std::string(kEvalCsvHeader) + "\n";
  for (const auto& file : o.bundles) {
    const ModelBundle bundle = load_bundle(file);
    const SplitPlan plan = plan_for(o, c, bundle.appliance);
    const SplitData split = load_split(data_dir(o), plan, bundle.appliance, bundle.period, c.max_gap);
    csv += to_csv_row(evaluate_bundle(bundle, split.test, std::string(to_string(plan.mode)))) + "\n";
  }
  emit(o, csv, out);
  return ok;
}

int do_disaggregate(const Options& o, std::ostream& out) {
  const Config c = effective_config(o);
  std::vector<ModelBundle> bundles;
  for (const auto& file : o.bundles) bundles.push_back(load_bundle(file));
  const auto root = data_dir(o);
  const std::int64_t period = bundles.front().period;
  const House house = load_house(root, o.house, period);

  PowerSeries joint = house.mains;
  std::vector<PowerSeries> truth;
  if (o.truth) {
    for (const auto& b : bundles) {
      truth.push_back(load_appliance(root, house, dataset_labels(b.appliance), period));
      for (std::size_t i = 0; i < joint.size(); ++i)
        if (is_missing(truth.back().values[i])) joint.values[i] = kMissing;
    }
  }

  std::string csv;
  std::size_t skip = o.first;
  std::size_t left = o.count.value_or(std::numeric_limits<std::size_t>::max());
  for (const auto& section : good_sections(joint, c.max_gap)) {
    if (left == 0) break;
    if (skip >= section.length) {
      skip -= section.length;
      continue;
    }
    const std::size_t start = section.start_index + skip;
    const std::size_t len = std::min(section.length - skip, left);
    skip = 0;
    left -= len;
    PowerSeries mains = house.mains.slice(start, len);
    forward_fill(mains, {0, len});
    const auto result = disaggregate(mains, bundles);
    std::vector<PowerSeries> section_truth;
    for (const auto& t : truth) {
      section_truth.push_back(t.slice(start, len));
      forward_fill(section_truth.back(), {0, len});
    }
    std::string part = export_csv(result, o.truth ? &section_truth : nullptr);
    csv += csv.empty() ? part : part.substr(part.find('\n') + 1);
  }
  if (csv.empty()) throw DataError("no usable mains samples in the requested range");
  emit(o, csv, out);
  return ok;
}

int do_export(const Options& o, std::ostream& out) {
  const ModelBundle b = load_bundle(o.bundles.front());
  if (o.format == "binary") {
    if (o.out.empty()) throw DataError("export-bundle --format binary needs --out");
    out << save_bundle(b, o.out) << " bytes\n";
    return ok;
  }
  using nlohmann::json;
  auto network = [](const nn::Network<float>& net) {
    json j;
    j["input"] = {net.input_shape().length, net.input_shape().features};
    j["layers"] = json::array();
    for (std::size_t i = 0; i < net.size(); ++i) {
      const auto& layer = net.layer(i);
      json l;
      l["kind"] = std::string(nn::to_string(layer.kind()));
      l["hyperparameters"] = layer.hyperparameters();
      for (const auto& p : layer.parameters()) {
        std::vector<float> data;
        data.reserve(static_cast<std::size_t>(p.value.size()));
        for (Index r = 0; r < p.value.rows(); ++r)
          for (Index c = 0; c < p.value.cols(); ++c) data.push_back(p.value(r, c));
        l["tensors"][p.name] = {{"shape", p.shape}, {"data", data}};
      }
      j["layers"].push_back(l);
    }
    return j;
  };
  json j;
  j["appliance"] = b.appliance;
  j["period"] = b.period;
  j["params"] = {{"on_threshold", b.params.on_threshold}, {"min_on", b.params.min_on}, {"min_off", b.params.min_off}};
  j["mains_scaler"] = {b.mains_scaler.x_min, b.mains_scaler.x_max};
  j["power_scaler"] = {b.power_scaler.x_min, b.power_scaler.x_max};
  j["index_scale"] = b.index_scale;
  j["off_mean"] = b.off.off_mean;
  j["parameters"] = b.param_count();
  j["classifier"] = network(b.classifier);
  j["regressor"] = network(b.regressor);
  emit(o, j.dump(1) + "\n", out);
  return ok;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Appliance-level disaggregation of household mains power", "nilm"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--data", o.data, "Dataset root (house_<k> directories); default $NILM_DATA_DIR");
    sub->add_option("--config", o.config, "INI configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "Random seed");
  };

  auto* stats = app.add_subcommand("stats", "Summarise one house");
  common(stats);
  stats->add_option("--house", o.house, "House id")->required();

  auto* simulate = app.add_subcommand("simulate", "Write synthetic houses in the dataset layout");
  simulate->add_option("--out", o.out, "Output root")->required();
  simulate->add_option("--days", o.days, "Days of 1-minute samples")->check(CLI::PositiveNumber);
  simulate->add_option("--house", o.houses, "House ids to generate");
  simulate->add_option("--seed", o.seed, "Random seed");

  auto* train = app.add_subcommand("train", "Train one appliance bundle");
  common(train);
  train->add_option("--appliance", o.appliance, "Appliance name")->required();
  train->add_option("--mode", o.mode, "same-house or cross-house");
  train->add_option("--house", o.houses, "Houses for the same-house protocol");
  train->add_option("--out", o.out, "Bundle path (default <appliance>.nilm)");
  train->add_option("--epochs", o.epochs, "Maximum epochs")->check(CLI::PositiveNumber);
  train->add_option("--window", o.window, "Classifier window length")->check(CLI::Range(10, 4096));

  auto* eval = app.add_subcommand("eval", "Score bundles on the test split");
  common(eval);
  eval->add_option("--bundle", o.bundles, "Bundle files")->required();
  eval->add_option("--mode", o.mode, "same-house or cross-house");
  eval->add_option("--house", o.houses, "Houses for the same-house protocol");
  eval->add_option("--out", o.out, "CSV path (default stdout)");

  auto* disagg = app.add_subcommand("disaggregate", "Per-appliance power from a house's mains");
  common(disagg);
  disagg->add_option("--bundle", o.bundles, "Bundle files")->required();
  disagg->add_option("--house", o.house, "House id")->required();
  disagg->add_option("--out", o.out, "CSV path (default stdout)");
  disagg->add_flag("--truth", o.truth, "Add metered appliance columns");
  disagg->add_option("--first", o.first, "Skip this many usable samples");
  disagg->add_option("--count", o.count, "Emit at most this many samples");

  auto* exp = app.add_subcommand("export-bundle", "Re-encode a bundle or dump it as JSON");
  exp->add_option("--bundle", o.bundles, "Bundle file")->required()->expected(1);
  exp->add_option("--format", o.format, "json or binary")->check(CLI::IsMember({"json", "binary"}));
  exp->add_option("--out", o.out, "Output path (JSON default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : usage;
  }

  try {
    if (*stats) return do_stats(o, out);
    if (*simulate) return do_simulate(o, out);
    if (*train) return do_train(o, out, err);
    if (*eval) return do_eval(o, out);
    if (*disagg) return do_disaggregate(o, out);
    if (*exp) return do_export(o, out);
  } catch (const TrainingError& e) {
    err << "training error: " << e.what() << "\n";
    return training;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return data;
  }
  return usage;
}

}  // namespace nilm::cli
