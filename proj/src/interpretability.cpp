#include "tmpvc/interpretability.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>

#include "tmpvc/errors.hpp"

namespace tmpvc::interp {

std::size_t RoleGrid::count(Role role) const { return static_cast<std::size_t>(std::count(roles_.begin(), roles_.end(), role)); }

RoleGrid clause_roles(const tm::ClauseTeam& clause, int rows, int cols) {
  if (clause.input_width() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw DimensionError("clause width " + std::to_string(clause.input_width()) + " does not match a " +
                         std::to_string(rows) + "x" + std::to_string(cols) + " grid");
  }
  RoleGrid grid(rows, cols);
  for (const auto& lit : tm::included_literals(clause)) {
    const int r = static_cast<int>(lit.pixel / static_cast<std::size_t>(cols));
    const int c = static_cast<int>(lit.pixel % static_cast<std::size_t>(cols));
    const Role current = grid(r, c);
    const Role incoming = lit.form == tm::LiteralForm::kPlain ? Role::kOne : Role::kZero;
    grid.set(r, c, current == Role::kStar ? incoming : Role::kConflict);
  }
  return grid;
}

AggregateMap aggregate(const tm::ClassBank& bank, tm::Polarity polarity, int rows, int cols) {
  AggregateMap map;
  map.zero_counts = CountGrid::Zero(rows, cols);
  map.one_counts = CountGrid::Zero(rows, cols);
  for (const auto& clause : bank.clauses()) {
    if (clause.polarity() != polarity) continue;
    ++map.clauses;
    const auto roles = clause_roles(clause, rows, cols);
    if (roles.has_conflict()) {
      ++map.skipped_conflicts;
      continue;
    }
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const Role role = roles(r, c);
        if (role == Role::kZero) ++map.zero_counts(r, c);
        if (role == Role::kOne) ++map.one_counts(r, c);
      }
    }
  }
  if (map.skipped_conflicts > 0) {
    std::cerr << "warning: skipped " << map.skipped_conflicts
              << " clause(s) that include a pixel in both forms\n";
  }
  return map;
}

double lld_value(int active, double floor_db) {
  if (active <= 0) return floor_db;
  return 10.0 * std::log10(static_cast<double>(active) / 9.0);
}

Eigen::ArrayXXd lld_heatmap(const CountGrid& counts, double floor_db) {
  return lld_heatmap(counts, 1, LldNumerator::kActivePixels, floor_db);
}

Eigen::ArrayXXd lld_heatmap(const CountGrid& counts, int clauses, LldNumerator numerator, double floor_db) {
  if (counts.rows() < 3 || counts.cols() < 3) throw DimensionError("LLD needs at least a 3x3 map");
  const Eigen::Index out_rows = counts.rows() - 2;
  const Eigen::Index out_cols = counts.cols() - 2;
  Eigen::ArrayXXd out(out_rows, out_cols);
  const Eigen::ArrayXXi active = (counts > 0).cast<int>();
  for (Eigen::Index r = 0; r < out_rows; ++r) {
    for (Eigen::Index c = 0; c < out_cols; ++c) {
      if (numerator == LldNumerator::kActivePixels) {
        out(r, c) = lld_value(active.block<3, 3>(r, c).sum(), floor_db);
      } else {
        const double sum = counts.block<3, 3>(r, c).cast<double>().sum();
        out(r, c) = (sum > 0 && clauses > 0) ? 10.0 * std::log10(sum / (9.0 * clauses)) : floor_db;
      }
    }
  }
  return out;
}

Eigen::VectorXd mean_waveform(std::span<const seg::BeatWindow> beats) {
  if (beats.empty()) throw std::invalid_argument("mean of an empty beat list");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(beats.front().samples.size());
  for (const auto& b : beats) {
    if (b.samples.size() != sum.size()) throw DimensionError("beats differ in length");
    sum += b.samples;
  }
  return sum / static_cast<double>(beats.size());
}

Eigen::VectorXd mean_waveform(std::span<const Eigen::VectorXd> waveforms) {
  if (waveforms.empty()) throw std::invalid_argument("mean of an empty waveform list");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(waveforms.front().size());
  for (const auto& w : waveforms) {
    if (w.size() != sum.size()) throw DimensionError("waveforms differ in length");
    sum += w;
  }
  return sum / static_cast<double>(waveforms.size());
}

std::vector<int> overlay_rows(const Overlay& overlay, int rows) {
  if (!(overlay.range.hi > overlay.range.lo)) throw std::invalid_argument("degenerate overlay range");
  std::vector<int> out(static_cast<std::size_t>(overlay.waveform.size()));
  for (Eigen::Index c = 0; c < overlay.waveform.size(); ++c) {
    const double a = std::clamp(overlay.waveform[c], overlay.range.lo, overlay.range.hi);
    const double u = (a - overlay.range.lo) / (overlay.range.hi - overlay.range.lo);
    out[static_cast<std::size_t>(c)] = static_cast<int>(std::lround((1.0 - u) * (rows - 1)));
  }
  return out;
}

namespace {

std::ofstream open_image(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

int ramp_index(double value, double floor_db) {
  const double t = (value - floor_db) / (0.0 - floor_db);
  return static_cast<int>(std::lround(std::clamp(t, 0.0, 1.0) * 255.0));
}

}  // namespace

std::array<std::uint8_t, 3> heat_color(int i) {
  i = std::clamp(i, 0, 255);
  return {static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(255 - std::abs(2 * i - 255)),
          static_cast<std::uint8_t>(255 - i)};
}

void export_role_map(const CountGrid& counts, const std::optional<Overlay>& overlay, const std::filesystem::path& path) {
  const int rows = static_cast<int>(counts.rows());
  const int cols = static_cast<int>(counts.cols());
  if (rows == 0 || cols == 0) throw DimensionError("empty role map");
  Eigen::ArrayXXi image = counts;
  const int maxval = std::max(1, counts.maxCoeff() + 1);
  image = maxval - image;
  if (overlay) {
    if (overlay->waveform.size() != cols) throw DimensionError("overlay length does not match map width");
    const auto rows_of = overlay_rows(*overlay, rows);
    for (int c = 0; c < cols; ++c) image(rows_of[static_cast<std::size_t>(c)], c) = 0;
  }
  auto out = open_image(path);
  out << "P2\n" << cols << ' ' << rows << '\n' << maxval << '\n';
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) out << image(r, c) << (c + 1 == cols ? '\n' : ' ');
  }
  if (!out) throw IoError("failed writing " + path.string());
}

void export_heatmap(const Eigen::ArrayXXd& lld, const std::optional<Overlay>& overlay,
                    const std::filesystem::path& path, double floor_db) {
  if (!(floor_db < 0.0)) throw std::invalid_argument("heatmap floor must be negative");
  const int rows = static_cast<int>(lld.rows());
  const int cols = static_cast<int>(lld.cols());
  if (rows == 0 || cols == 0) throw DimensionError("empty heatmap");
  Eigen::ArrayXXi index(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) index(r, c) = ramp_index(lld(r, c), floor_db);
  }
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> dark = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(rows, cols, false);
  if (overlay) {
    // Heatmap cell (r, c) is the window centred on source pixel (r + 1, c + 1).
    if (overlay->waveform.size() != cols + 2) throw DimensionError("overlay length does not match source map width");
    const auto rows_of = overlay_rows(*overlay, rows + 2);
    for (int c = 0; c < cols; ++c) {
      const int r = rows_of[static_cast<std::size_t>(c + 1)] - 1;
      if (r >= 0 && r < rows) dark(r, c) = true;
    }
  }
  auto out = open_image(path);
  out << "P3\n" << cols << ' ' << rows << "\n255\n";
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const auto rgb = dark(r, c) ? std::array<std::uint8_t, 3>{0, 0, 0} : heat_color(index(r, c));
      out << int{rgb[0]} << ' ' << int{rgb[1]} << ' ' << int{rgb[2]} << (c + 1 == cols ? '\n' : ' ');
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
}

NetpbmImage read_netpbm(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  NetpbmImage img;
  if (!(in >> img.magic >> img.width >> img.height >> img.maxval) || (img.magic != "P2" && img.magic != "P3")) {
    throw FormatError("bad netpbm header in " + path.string());
  }
  const std::size_t channels = img.magic == "P3" ? 3 : 1;
  const std::size_t n = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height) * channels;
  img.values.reserve(n);
  for (int v; img.values.size() < n && in >> v;) img.values.push_back(v);
  if (img.values.size() != n) throw FormatError("netpbm body truncated in " + path.string());
  return img;
}

std::string class_report(const tm::ClassBank& bank, std::string_view class_name, int rows, int cols) {
  std::ostringstream out;
  out << "class " << class_name << '\n';
  for (auto polarity : {tm::Polarity::kPositive, tm::Polarity::kNegative}) {
    const auto map = aggregate(bank, polarity, rows, cols);
    std::size_t literals = 0;
    for (const auto& clause : bank.clauses()) {
      if (clause.polarity() == polarity) literals += clause.included_count();
    }
    const double mean = map.clauses > 0 ? static_cast<double>(literals) / map.clauses : 0.0;
    out << (polarity == tm::Polarity::kPositive ? "positive" : "negative") << " polarity\n";
    out << "  clauses: " << map.clauses << '\n';
    out << "  mean included literals: " << std::fixed << std::setprecision(3) << mean << '\n';
    if (map.skipped_conflicts > 0) out << "  clauses with conflicting pixels: " << map.skipped_conflicts << '\n';

    const CountGrid total = map.zero_counts + map.one_counts;
    std::vector<int> order(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
    std::iota(order.begin(), order.end(), 0);
    auto count_at = [&](int k) { return total(k / cols, k % cols); };
    const auto top = std::min<std::size_t>(20, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top), order.end(),
                      [&](int a, int b) { return count_at(a) != count_at(b) ? count_at(a) > count_at(b) : a < b; });
    out << "  top pixels (row col negated plain):\n";
    for (std::size_t i = 0; i < top; ++i) {
      const int k = order[i];
      if (count_at(k) == 0) break;
      out << "    " << k / cols << ' ' << k % cols << ' ' << map.zero_counts(k / cols, k % cols) << ' '
          << map.one_counts(k / cols, k % cols) << '\n';
    }
  }
  return out.str();
}

}  // namespace tmpvc::interp
