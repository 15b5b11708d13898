#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace tmpvc::metrics {

/// Entry (i, j) counts samples of true class i predicted as class j.
class ConfusionMatrix {
 public:
  using Counts = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

  explicit ConfusionMatrix(int classes = 3) : counts_(Counts::Zero(classes, classes)) {}
  static ConfusionMatrix from_counts(const Counts& counts);

  void add(int truth, int predicted, std::int64_t n = 1);

  int classes() const noexcept { return static_cast<int>(counts_.rows()); }
  std::int64_t operator()(int truth, int predicted) const { return counts_(truth, predicted); }
  std::int64_t total() const { return counts_.sum(); }
  const Counts& counts() const noexcept { return counts_; }

  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  bool operator==(const ConfusionMatrix& other) const { return counts_ == other.counts_; }

 private:
  Counts counts_;
};

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted, int classes = 3);

/// One-vs-rest figures for a single class.
struct ClassMetrics {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;
  std::int64_t support = 0;  // tp + fn
  double precision = 0.0;    // tp / (tp + fp), 0 when undefined
  double recall = 0.0;       // tp / (tp + fn), 0 when undefined
  double accuracy = 0.0;     // (tp + tn) / total
  bool precision_defined = true;
  bool recall_defined = true;
};

struct ClassReport {
  std::vector<ClassMetrics> classes;
  double accuracy = 0.0;  // trace / total
  std::int64_t total = 0;
};

/// Throws std::invalid_argument on an all-zero matrix.
ClassReport report(const ConfusionMatrix& cm);

/// Aligned-column text table.
std::string format_report(const ClassReport& r, std::span<const std::string> class_names);

}  // namespace tmpvc::metrics
