#include "nilm/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>

#include "nilm/error.hpp"
#include "nilm/eval.hpp"
#include "nilm/nn/adam.hpp"

namespace nilm {

SplitMode parse_split_mode(std::string_view text) {
  if (text == "same_house" || text == "same-house") return SplitMode::same_house;
  if (text == "cross_house" || text == "cross-house") return SplitMode::cross_house;
  throw DataError("unknown split mode '" + std::string(text) + "'");
}

std::string_view to_string(SplitMode mode) { return mode == SplitMode::same_house ? "same_house" : "cross_house"; }

SplitPlan make_split(std::string_view appliance, SplitMode mode, std::set<int> houses) {
  SplitPlan plan;
  plan.mode = mode;
  if (mode == SplitMode::same_house) {
    if (houses.empty()) throw DataError("same-house split needs at least one house");
    plan.train_houses = houses;
    plan.test_houses = std::move(houses);
    return plan;
  }
  if (appliance == "refrigerator") {
    plan.train_houses = {2, 3, 5, 6};
    plan.test_houses = {1};
  } else if (appliance == "microwave") {
    plan.train_houses = {1, 2};
    plan.test_houses = {3};
  } else if (appliance == "dishwasher") {
    plan.train_houses = {1, 2};
    plan.test_houses = {4};
  } else {
    throw DataError("no cross-house split for appliance '" + std::string(appliance) + "'");
  }
  return plan;
}

std::string TrainReport::to_csv() const {
  std::string out = "epoch,train_loss,val_loss,val_metric\n";
  char buf[128];
  for (const auto& e : epochs) {
    std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g,%.9g\n", e.epoch, e.train_loss, e.val_loss, e.val_metric);
    out += buf;
  }
  return out;
}

BalancedBatches::BalancedBatches(std::vector<std::uint8_t> labels, Index batch_size, std::uint64_t seed,
                                 Index min_batches)
    : batch_size_(batch_size), min_batches_(std::max<Index>(min_batches, 1)), rng_(seed) {
  if (batch_size < 2) throw DataError("balanced batches need batch_size >= 2");
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? on_ : off_).push_back(static_cast<Index>(i));
  if (on_.empty() || off_.empty()) throw TrainingError("balanced batches need both classes present");
}

Index BalancedBatches::batches_per_epoch() const {
  const Index half = batch_size_ / 2;
  const Index n = static_cast<Index>(on_.size() + off_.size());
  return std::max({(n + batch_size_ - 1) / batch_size_, (static_cast<Index>(on_.size()) + half - 1) / half, min_batches_});
}

std::vector<std::vector<Index>> BalancedBatches::next_epoch() {
  const Index half = batch_size_ / 2;
  const Index batches = batches_per_epoch();
  // Draws from a reshuffled pool, refilling when exhausted.
  auto draw = [this](const std::vector<Index>& pool, Index count) {
    std::vector<Index> out;
    out.reserve(static_cast<std::size_t>(count));
    std::vector<Index> perm;
    while (static_cast<Index>(out.size()) < count) {
      perm = pool;
      rng_.shuffle(perm);
      const auto take = std::min<std::size_t>(perm.size(), static_cast<std::size_t>(count) - out.size());
      out.insert(out.end(), perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(take));
    }
    return out;
  };
  const auto on = draw(on_, batches * half);
  const auto off = draw(off_, batches * half);
  std::vector<std::vector<Index>> out(static_cast<std::size_t>(batches));
  for (Index b = 0; b < batches; ++b) {
    auto& batch = out[static_cast<std::size_t>(b)];
    batch.insert(batch.end(), on.begin() + b * half, on.begin() + (b + 1) * half);
    batch.insert(batch.end(), off.begin() + b * half, off.begin() + (b + 1) * half);
    rng_.shuffle(batch);
  }
  return out;
}

std::vector<std::vector<Index>> shuffled_batches(Index n, Index batch_size, Index min_batches, Rng& rng) {
  if (n <= 0) return {};
  const Index batches = std::max((n + batch_size - 1) / batch_size, min_batches);
  std::vector<Index> order;
  std::vector<std::vector<Index>> out;
  out.reserve(static_cast<std::size_t>(batches));
  std::size_t cursor = 0;
  for (Index b = 0; b < batches; ++b) {
    std::vector<Index> batch;
    while (static_cast<Index>(batch.size()) < std::min(batch_size, n)) {
      if (cursor == order.size()) {
        order.resize(static_cast<std::size_t>(n));
        for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
        rng.shuffle(order);
        cursor = 0;
      }
      batch.push_back(order[cursor++]);
    }
    out.push_back(std::move(batch));
  }
  return out;
}

VectorXf predict_on_probability(const nn::Network<float>& classifier, const WindowSet& windows, Index chunk) {
  VectorXf out(windows.size());
  for (Index first = 0; first < windows.size(); first += chunk) {
    const Index count = std::min(chunk, windows.size() - first);
    const auto probs = classifier.forward(windows.batch(first, count));
    out.segment(first, count) = probs[0].row(1).transpose();
  }
  return out;
}

std::vector<std::uint8_t> predict_states(const nn::Network<float>& classifier, const WindowSet& windows) {
  const VectorXf p = predict_on_probability(classifier, windows);
  std::vector<std::uint8_t> states(static_cast<std::size_t>(p.size()));
  for (Index i = 0; i < p.size(); ++i) states[static_cast<std::size_t>(i)] = p(i) > 0.5f ? 1 : 0;
  return states;
}

namespace {

struct Holdout {
  Index train_end;
  Index val_begin;
};

Holdout holdout(Index n, double fraction) {
  const auto n_val = static_cast<Index>(std::floor(static_cast<double>(n) * fraction));
  if (n_val <= 0 || n_val >= n) return {n, 0};
  return {n - n_val, n - n_val};
}

MatrixXf one_hot(const std::vector<std::uint8_t>& labels, std::span<const Index> rows) {
  MatrixXf y = MatrixXf::Zero(2, static_cast<Index>(rows.size()));
  for (std::size_t b = 0; b < rows.size(); ++b) y(labels[static_cast<std::size_t>(rows[b])] ? 1 : 0, static_cast<Index>(b)) = 1.0f;
  return y;
}

void check_config(const TrainConfig& c) {
  if (!(c.step_size > 0) || c.batch_size < 1 || c.max_epochs < 1 || c.patience < 1)
    throw TrainingError("training configuration values must be positive");
  if (c.validation_fraction < 0 || c.validation_fraction >= 1)
    throw TrainingError("validation_fraction must be in [0, 1)");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

TrainedNetwork train_classifier(const WindowSet& windows, const TrainConfig& config) {
  check_config(config);
  const auto t0 = std::chrono::steady_clock::now();
  const Index n = windows.size();
  if (n == 0) throw TrainingError("train_classifier: no windows");
  if (static_cast<Index>(windows.labels.size()) != n) throw TrainingError("train_classifier: windows are unlabelled");
  const auto [train_end, val_begin] = holdout(n, config.validation_fraction);

  std::vector<std::uint8_t> train_labels(windows.labels.begin(), windows.labels.begin() + train_end);
  const auto on = std::count(train_labels.begin(), train_labels.end(), 1);
  if (on == 0 || on == static_cast<std::ptrdiff_t>(train_labels.size()))
    throw TrainingError("train_classifier: training data holds a single class");

  WindowSet val;
  val.window_len = windows.window_len;
  val.label_offset = windows.label_offset;
  val.windows = windows.windows.middleRows(val_begin, n - val_begin);
  val.labels.assign(windows.labels.begin() + val_begin, windows.labels.end());

  TrainedNetwork result{build_classifier<float>(windows.window_len, config.seed), {}};
  nn::Network<float> net = result.network;
  nn::AdamState<float> adam(net, {.step_size = config.step_size});
  Rng rng(config.seed + 1);
  std::optional<BalancedBatches> balanced;
  if (config.balance) balanced.emplace(train_labels, config.batch_size, config.seed + 2, config.min_batches_per_epoch);

  int since_best = 0;
  bool have_best = false;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto batches = balanced ? balanced->next_epoch()
                                  : shuffled_batches(train_end, config.batch_size, config.min_batches_per_epoch, rng);
    double loss_sum = 0;
    for (const auto& rows : batches) {
      auto step = nn::backward(net, windows.batch(rows), one_hot(windows.labels, rows), nn::LossKind::cross_entropy);
      nn::adam_step(net, step.grads, adam);
      loss_sum += step.loss;
    }

    const VectorXf p_on = predict_on_probability(net, val);
    std::vector<std::uint8_t> pred(static_cast<std::size_t>(val.size()));
    double val_loss = 0;
    for (Index i = 0; i < val.size(); ++i) {
      pred[static_cast<std::size_t>(i)] = p_on(i) > 0.5f ? 1 : 0;
      const double p_true = val.labels[static_cast<std::size_t>(i)] ? p_on(i) : 1.0 - p_on(i);
      val_loss -= std::log(std::max(p_true, nn::kProbabilityFloor));
    }
    val_loss /= static_cast<double>(std::max<Index>(val.size(), 1));
    const double f1 = classification_metrics(pred, val.labels).report.f1;

    result.report.epochs.push_back({epoch, loss_sum / static_cast<double>(batches.size()), val_loss, f1});
    const bool improved = !have_best || f1 > result.report.best_val_metric ||
                          (f1 == result.report.best_val_metric && val_loss < result.report.best_val_loss);
    if (improved) {
      have_best = true;
      result.network = net;
      result.report.best_epoch = epoch;
      result.report.best_val_metric = f1;
      result.report.best_val_loss = val_loss;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  result.report.seconds = seconds_since(t0);
  return result;
}

TrainedNetwork train_regressor(const RegressorSamples& samples, const TrainConfig& config) {
  check_config(config);
  const auto t0 = std::chrono::steady_clock::now();
  const Index n = samples.size();
  if (n == 0) throw TrainingError("train_regressor: no samples");
  const auto [train_end, val_begin] = holdout(n, config.validation_fraction);

  std::vector<Index> val_rows;
  for (Index i = val_begin; i < n; ++i) val_rows.push_back(i);
  const auto val_x = samples.batch(val_rows);
  MatrixXf val_y(1, static_cast<Index>(val_rows.size()));
  for (std::size_t i = 0; i < val_rows.size(); ++i) val_y(0, static_cast<Index>(i)) = samples.targets(val_rows[i]);

  TrainedNetwork result{build_regressor<float>(config.seed), {}};
  nn::Network<float> net = result.network;
  nn::AdamState<float> adam(net, {.step_size = config.step_size});
  Rng rng(config.seed + 1);

  int since_best = 0;
  bool have_best = false;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto batches = shuffled_batches(train_end, config.batch_size, config.min_batches_per_epoch, rng);
    double loss_sum = 0;
    for (const auto& rows : batches) {
      MatrixXf y(1, static_cast<Index>(rows.size()));
      for (std::size_t i = 0; i < rows.size(); ++i) y(0, static_cast<Index>(i)) = samples.targets(rows[i]);
      auto step = nn::backward(net, samples.batch(rows), y, nn::LossKind::mean_squared_error);
      nn::adam_step(net, step.grads, adam);
      loss_sum += step.loss;
    }
    const double val_loss = nn::evaluate_loss(net, val_x, val_y, nn::LossKind::mean_squared_error);
    if (!std::isfinite(val_loss)) throw TrainingError("train_regressor: validation loss diverged");
    result.report.epochs.push_back({epoch, loss_sum / static_cast<double>(batches.size()), val_loss, val_loss});
    if (!have_best || val_loss < result.report.best_val_loss) {
      have_best = true;
      result.network = net;
      result.report.best_epoch = epoch;
      result.report.best_val_loss = val_loss;
      result.report.best_val_metric = val_loss;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  result.report.seconds = seconds_since(t0);
  return result;
}

}  // namespace nilm
