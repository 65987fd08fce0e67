#include "nilm/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <sstream>

#include "nilm/error.hpp"

namespace nilm {

namespace pt = boost::property_tree;

namespace {

template <typename T>
void read(const pt::ptree& section, const std::string& section_name, const char* key, T& value) {
  const auto node = section.get_child_optional(key);
  if (!node) return;
  try {
    value = node->get_value<T>();
  } catch (const pt::ptree_error&) {
    throw ParseError("[" + section_name + "] " + key + ": cannot parse '" + node->data() + "'", 0);
  }
}

void read_bool(const pt::ptree& section, const std::string& section_name, const char* key, bool& value) {
  const auto node = section.get_child_optional(key);
  if (!node) return;
  const auto& v = node->data();
  if (v == "true" || v == "on" || v == "1" || v == "yes") {
    value = true;
  } else if (v == "false" || v == "off" || v == "0" || v == "no") {
    value = false;
  } else {
    throw ParseError("[" + section_name + "] " + key + ": expected a boolean, got '" + v + "'", 0);
  }
}

}  // namespace

ApplianceParams Config::appliance(std::string_view name) const {
  for (const auto& a : appliances)
    if (a.name == name) return a;
  if (auto p = default_params(name)) return *p;
  throw DataError("unknown appliance '" + std::string(name) + "'");
}

Config default_config() {
  Config c;
  for (const auto& name : known_appliances()) c.appliances.push_back(*default_params(name));
  return c;
}

Config parse_config(std::string_view text) {
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(e.message(), e.line());
  }
  Config c = default_config();
  for (const auto& [name, section] : tree) {
    if (section.empty() && !section.data().empty())
      throw ParseError("key '" + name + "' outside of any section", 0);
    if (name == "train") {
      auto& t = c.train;
      read(section, name, "window", t.window);
      read(section, name, "step_size", t.classifier.step_size);
      read(section, name, "batch_size", t.classifier.batch_size);
      read(section, name, "max_epochs", t.classifier.max_epochs);
      read(section, name, "patience", t.classifier.patience);
      read(section, name, "seed", t.classifier.seed);
      read_bool(section, name, "balance", t.classifier.balance);
      read(section, name, "validation_fraction", t.classifier.validation_fraction);
      read(section, name, "min_batches_per_epoch", t.classifier.min_batches_per_epoch);
      const bool balance = t.regressor.balance;
      t.regressor = t.classifier;
      t.regressor.balance = balance;
    } else if (name == "data") {
      read(section, name, "period", c.period);
      read(section, name, "max_gap", c.max_gap);
      read(section, name, "train_fraction", c.train_fraction);
    } else {
      ApplianceParams p{name};
      if (auto known = default_params(name)) p = *known;
      for (const auto& a : c.appliances)
        if (a.name == name) p = a;
      read(section, name, "on_threshold", p.on_threshold);
      read(section, name, "min_on", p.min_on);
      read(section, name, "min_off", p.min_off);
      if (!(p.on_threshold > 0) || p.min_on < 0 || p.min_off < 0)
        throw ParseError("[" + name + "] thresholds must be positive and durations non-negative", 0);
      bool replaced = false;
      for (auto& a : c.appliances)
        if (a.name == name) {
          a = p;
          replaced = true;
        }
      if (!replaced) c.appliances.push_back(p);
    }
  }
  const auto& t = c.train.classifier;
  if (c.train.window < 10) throw ParseError("[train] window must be >= 10", 0);
  if (!(t.step_size > 0) || t.batch_size < 2 || t.max_epochs < 1 || t.patience < 1 || t.min_batches_per_epoch < 1)
    throw ParseError("[train] step_size, batch_size, max_epochs, patience and min_batches_per_epoch must be positive", 0);
  if (!(t.validation_fraction >= 0 && t.validation_fraction < 1))
    throw ParseError("[train] validation_fraction must be in [0, 1)", 0);
  if (c.period < 1 || c.max_gap < c.period) throw ParseError("[data] need period >= 1 and max_gap >= period", 0);
  if (!(c.train_fraction > 0 && c.train_fraction < 1)) throw ParseError("[data] train_fraction must be in (0, 1)", 0);
  return c;
}

Config load_config(const std::filesystem::path& path) { return parse_config(read_text_file(path)); }

}  // namespace nilm
