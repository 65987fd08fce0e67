#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nilm/features.hpp"
#include "nilm/models.hpp"
#include "nilm/rng.hpp"

namespace nilm {

enum class SplitMode { same_house, cross_house };

SplitMode parse_split_mode(std::string_view text);
std::string_view to_string(SplitMode mode);

struct SplitPlan {
  SplitMode mode = SplitMode::same_house;
  std::set<int> train_houses;
  std::set<int> test_houses;
  double train_fraction = 0.70;
};

/// Cross-house mode uses the fixed house assignment per appliance
/// (refrigerator, microwave, dishwasher). Same-house mode trains and tests on
/// `houses` with a chronological `train_fraction` cut.
SplitPlan make_split(std::string_view appliance, SplitMode mode, std::set<int> houses = {1});

struct TrainConfig {
  double step_size = 1e-3;
  Index batch_size = 64;
  int max_epochs = 50;
  int patience = 5;
  std::uint64_t seed = 0;
  bool balance = true;
  /// Tail fraction of the training rows held out for early stopping; 0 validates on the training rows.
  double validation_fraction = 0.10;
  /// Lower bound on optimiser steps per epoch for small datasets.
  Index min_batches_per_epoch = 32;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0;
  double val_loss = 0;
  double val_metric = 0;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  double best_val_loss = 0;
  double best_val_metric = 0;
  double seconds = 0;

  /// "epoch,train_loss,val_loss,val_metric" rows. Timing is not included.
  std::string to_csv() const;
};

/// One epoch of class-balanced minibatches over binary labels: every batch
/// holds batch/2 on rows and batch/2 off rows. On rows are cycled so each
/// appears at least once per epoch; off rows are subsampled (or cycled when scarce).
/// An epoch has at least `min_batches` batches.
class BalancedBatches {
 public:
  BalancedBatches(std::vector<std::uint8_t> labels, Index batch_size, std::uint64_t seed, Index min_batches = 1);

  std::vector<std::vector<Index>> next_epoch();
  Index batches_per_epoch() const;

 private:
  std::vector<Index> on_, off_;
  Index batch_size_;
  Index min_batches_;
  Rng rng_;
};

/// Plain shuffled minibatches over n rows.
std::vector<std::vector<Index>> shuffled_batches(Index n, Index batch_size, Index min_batches, Rng& rng);

struct TrainedNetwork {
  nn::Network<float> network;
  TrainReport report;
};

/// Minimises cross-entropy; keeps the epoch with the best validation F1
/// (ties broken by validation loss) and stops after `patience` epochs without one.
TrainedNetwork train_classifier(const WindowSet& windows, const TrainConfig& config);

/// Minimises MSE on scaled targets; keeps the epoch with the lowest validation MSE.
TrainedNetwork train_regressor(const RegressorSamples& samples, const TrainConfig& config);

/// Classifier probabilities of the "on" class for every window.
VectorXf predict_on_probability(const nn::Network<float>& classifier, const WindowSet& windows, Index chunk = 4096);

/// argmax over the two classes.
std::vector<std::uint8_t> predict_states(const nn::Network<float>& classifier, const WindowSet& windows);

}  // namespace nilm
