#include "tmpvc/crossval.hpp"

#include <cstdio>
#include <random>

#include "tmpvc/errors.hpp"

namespace tmpvc::metrics {

void TrainConfig::validate() const {
  params.validate();
  if (epochs < 1) throw ConfigError("epochs must be >= 1, got " + std::to_string(epochs));
}

tm::MultiClassModel train_model(std::span<const InputVector> inputs, std::span<const int> labels,
                                const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  tm::MultiClassModel model(config.params);
  std::mt19937_64 rng(config.seed);
  const tm::FitOptions options{config.boost_true_positive};
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto result = tm::fit_epoch(model, inputs, labels, rng, config.shuffle, options);
    if (on_epoch) on_epoch(epoch, result.accuracy);
  }
  return model;
}

std::uint64_t fold_seed(std::uint64_t seed, int fold) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(fold)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return static_cast<std::uint64_t>(out[0]) << 32 | out[1];
}

CrossValidationResult cross_validate(std::span<const data::LabeledBeat> beats, const data::FoldPlan& plan,
                                     const TrainConfig& config, const std::function<void(int, int, double)>& on_epoch) {
  config.validate();
  const int k = static_cast<int>(plan.folds.size());
  if (k < 2) throw ConfigError("cross-validation needs at least 2 folds");

  std::vector<int> fold_of(beats.size());
  for (std::size_t i = 0; i < beats.size(); ++i) {
    fold_of[i] = plan.fold_of(beats[i].subject_id);
    if (fold_of[i] < 0) throw ConfigError("subject '" + beats[i].subject_id + "' is missing from the fold plan");
  }

  const int classes = config.params.classes;
  CrossValidationResult result{{}, ConfusionMatrix(classes), {}, {}};
  for (int f = 0; f < k; ++f) {
    std::vector<InputVector> train_x;
    std::vector<int> train_y;
    std::vector<std::size_t> test;
    for (std::size_t i = 0; i < beats.size(); ++i) {
      if (fold_of[i] == f) {
        test.push_back(i);
      } else {
        train_x.push_back(beats[i].input);
        train_y.push_back(static_cast<int>(beats[i].label));
      }
    }
    FoldResult fr{f, train_x.size(), test.size(), ConfusionMatrix(classes), {}};
    if (!train_x.empty()) {
      TrainConfig fold_config = config;
      fold_config.seed = fold_seed(config.seed, f);
      const auto model = train_model(train_x, train_y, fold_config, [&](int epoch, double acc) {
        if (on_epoch) on_epoch(f, epoch, acc);
      });
      for (auto i : test) fr.confusion.add(static_cast<int>(beats[i].label), tm::predict_multiclass(model, beats[i].input));
    }
    if (fr.confusion.total() > 0) fr.report = report(fr.confusion);
    result.pooled += fr.confusion;
    result.folds.push_back(std::move(fr));
  }
  result.pooled_report = report(result.pooled);

  // Unweighted fold mean over folds that evaluated anything.
  auto& avg = result.fold_average;
  avg.classes.assign(static_cast<std::size_t>(classes), ClassMetrics{});
  int used = 0;
  for (const auto& fr : result.folds) {
    if (fr.confusion.total() == 0) continue;
    ++used;
    avg.accuracy += fr.report.accuracy;
    avg.total += fr.report.total;
    for (std::size_t c = 0; c < avg.classes.size(); ++c) {
      avg.classes[c].precision += fr.report.classes[c].precision;
      avg.classes[c].recall += fr.report.classes[c].recall;
      avg.classes[c].accuracy += fr.report.classes[c].accuracy;
      avg.classes[c].support += fr.report.classes[c].support;
    }
  }
  if (used > 0) {
    avg.accuracy /= used;
    for (auto& c : avg.classes) {
      c.precision /= used;
      c.recall /= used;
      c.accuracy /= used;
    }
  }
  return result;
}

std::string cross_validation_csv(const CrossValidationResult& result) {
  std::string out = "fold,class,precision,recall,accuracy,support\n";
  char line[160];
  auto rows = [&](const std::string& fold, const ClassReport& r) {
    for (std::size_t c = 0; c < r.classes.size(); ++c) {
      const auto& k = r.classes[c];
      std::snprintf(line, sizeof line, "%s,%zu,%.6f,%.6f,%.6f,%lld\n", fold.c_str(), c, k.precision, k.recall,
                    k.accuracy, static_cast<long long>(k.support));
      out += line;
    }
    std::snprintf(line, sizeof line, "%s,all,,,%.6f,%lld\n", fold.c_str(), r.accuracy, static_cast<long long>(r.total));
    out += line;
  };
  for (const auto& fr : result.folds) {
    if (fr.confusion.total() > 0) rows(std::to_string(fr.fold), fr.report);
  }
  rows("pooled", result.pooled_report);
  rows("mean", result.fold_average);
  return out;
}

}  // namespace tmpvc::metrics
