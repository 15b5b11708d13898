#include "tmpvc/metrics.hpp"

#include <cstdio>
#include <stdexcept>

#include "tmpvc/errors.hpp"

namespace tmpvc::metrics {

ConfusionMatrix ConfusionMatrix::from_counts(const Counts& counts) {
  if (counts.rows() != counts.cols() || counts.rows() == 0) throw DimensionError("confusion matrix must be square");
  if ((counts.array() < 0).any()) throw std::invalid_argument("confusion counts must be non-negative");
  ConfusionMatrix cm(static_cast<int>(counts.rows()));
  cm.counts_ = counts;
  return cm;
}

void ConfusionMatrix::add(int truth, int predicted, std::int64_t n) {
  if (truth < 0 || truth >= classes() || predicted < 0 || predicted >= classes()) {
    throw std::out_of_range("label out of range [0, " + std::to_string(classes()) + ")");
  }
  counts_(truth, predicted) += n;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.classes() != classes()) throw DimensionError("confusion matrices differ in class count");
  counts_ += other.counts_;
  return *this;
}

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted, int classes) {
  if (truth.size() != predicted.size()) throw DimensionError("label sequences differ in length");
  ConfusionMatrix cm(classes);
  for (std::size_t i = 0; i < truth.size(); ++i) cm.add(truth[i], predicted[i]);
  return cm;
}

ClassReport report(const ConfusionMatrix& cm) {
  const auto& m = cm.counts();
  const std::int64_t total = m.sum();
  if (total == 0) throw std::invalid_argument("cannot report on an empty confusion matrix");
  ClassReport r;
  r.total = total;
  r.accuracy = static_cast<double>(m.trace()) / static_cast<double>(total);
  for (int c = 0; c < cm.classes(); ++c) {
    ClassMetrics k;
    k.tp = m(c, c);
    k.fp = m.col(c).sum() - k.tp;
    k.fn = m.row(c).sum() - k.tp;
    k.tn = total - k.tp - k.fp - k.fn;
    k.support = k.tp + k.fn;
    k.precision_defined = k.tp + k.fp > 0;
    k.recall_defined = k.tp + k.fn > 0;
    k.precision = k.precision_defined ? static_cast<double>(k.tp) / static_cast<double>(k.tp + k.fp) : 0.0;
    k.recall = k.recall_defined ? static_cast<double>(k.tp) / static_cast<double>(k.tp + k.fn) : 0.0;
    k.accuracy = static_cast<double>(k.tp + k.tn) / static_cast<double>(total);
    r.classes.push_back(k);
  }
  return r;
}

std::string format_report(const ClassReport& r, std::span<const std::string> class_names) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %10s %10s %10s %10s\n", "class", "precision", "recall", "accuracy", "support");
  out += line;
  for (std::size_t c = 0; c < r.classes.size(); ++c) {
    const auto& k = r.classes[c];
    const std::string name = c < class_names.size() ? class_names[c] : std::to_string(c);
    char p[16];
    char q[16];
    std::snprintf(p, sizeof p, k.precision_defined ? "%.4f" : "undef", k.precision);
    std::snprintf(q, sizeof q, k.recall_defined ? "%.4f" : "undef", k.recall);
    std::snprintf(line, sizeof line, "%-10s %10s %10s %10.4f %10lld\n", name.c_str(), p, q, k.accuracy,
                  static_cast<long long>(k.support));
    out += line;
  }
  std::snprintf(line, sizeof line, "%-10s %10s %10s %10.4f %10lld\n", "overall", "", "", r.accuracy,
                static_cast<long long>(r.total));
  out += line;
  return out;
}

}  // namespace tmpvc::metrics
