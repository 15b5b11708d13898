#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tmpvc/dataset.hpp"
#include "tmpvc/metrics.hpp"
#include "tmpvc/tsetlin.hpp"

namespace tmpvc::metrics {

struct TrainConfig {
  tm::Hyperparameters params;
  int epochs = 150;
  bool boost_true_positive = false;
  bool shuffle = true;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Called after every epoch with (epoch, training accuracy).
using EpochCallback = std::function<void(int, double)>;

/// Fresh model trained for config.epochs epochs from config.seed.
tm::MultiClassModel train_model(std::span<const InputVector> inputs, std::span<const int> labels,
                                const TrainConfig& config, const EpochCallback& on_epoch = {});

struct FoldResult {
  int fold = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  ConfusionMatrix confusion;
  ClassReport report;
};

struct CrossValidationResult {
  std::vector<FoldResult> folds;
  ConfusionMatrix pooled;
  ClassReport pooled_report;
  ClassReport fold_average;  // unweighted mean of the per-fold figures
};

/// Seed for the model of one fold, derived from the run seed and fold index.
std::uint64_t fold_seed(std::uint64_t seed, int fold);

/// Trains on all folds but one and evaluates on the held-out fold, for every
/// fold. Throws ConfigError when a beat's subject is not in the plan.
CrossValidationResult cross_validate(std::span<const data::LabeledBeat> beats, const data::FoldPlan& plan,
                                     const TrainConfig& config,
                                     const std::function<void(int, int, double)>& on_epoch = {});

/// "fold,class,precision,recall,accuracy,support" rows; fold is "pooled" or
/// "mean" for the summaries and class "all" carries overall accuracy.
std::string cross_validation_csv(const CrossValidationResult& result);

}  // namespace tmpvc::metrics
