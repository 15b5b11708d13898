#pragma once

// Pixel roles of trained clauses, per-class aggregate maps, local logarithmic
// density (LLD) heatmaps and their image exports.
//
// Images are plain-text netpbm files so tests can read them back:
//   role maps  P2 graymap, maxval = (largest count + 1), pixel = maxval - count,
//              so white means no clause uses the pixel; overlay pixels are 0.
//   heatmaps   P3 pixmap, maxval 255. A value v in [floor, 0] dB maps to ramp
//              index i = round(255 * (v - floor) / -floor) and colour
//              (i, 255 - |2i - 255|, 255 - i): blue at the floor, green in the
//              middle, red at 0 dB. Overlay pixels are black.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "tmpvc/segmentation.hpp"
#include "tmpvc/tsetlin.hpp"

namespace tmpvc::interp {

enum class Role : std::uint8_t { kStar, kOne, kZero, kConflict };

class RoleGrid {
 public:
  RoleGrid(int rows, int cols) : rows_(rows), cols_(cols), roles_(static_cast<std::size_t>(rows) * cols, Role::kStar) {}

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  Role operator()(int r, int c) const { return roles_.at(index(r, c)); }
  void set(int r, int c, Role role) { roles_.at(index(r, c)) = role; }
  std::size_t count(Role role) const;
  bool has_conflict() const { return count(Role::kConflict) > 0; }

 private:
  std::size_t index(int r, int c) const { return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(c); }

  int rows_;
  int cols_;
  std::vector<Role> roles_;
};

/// ONE where the plain literal is Included, ZERO where the negated one is,
/// CONFLICT where both are, STAR otherwise. Pixel k sits at (k / cols, k % cols).
RoleGrid clause_roles(const tm::ClauseTeam& clause, int rows = seg::kAmplitudeRows, int cols = seg::kBeatLength);

using CountGrid = Eigen::ArrayXXi;

struct AggregateMap {
  CountGrid zero_counts;  // clauses including the pixel in negated form
  CountGrid one_counts;   // clauses including the pixel in plain form
  int clauses = 0;        // clauses of the requested polarity
  int skipped_conflicts = 0;
};

/// Counts over all clauses of one polarity in a bank. Clauses holding a
/// conflicting pixel are left out and counted in skipped_conflicts.
AggregateMap aggregate(const tm::ClassBank& bank, tm::Polarity polarity, int rows = seg::kAmplitudeRows,
                       int cols = seg::kBeatLength);

enum class LldNumerator : std::uint8_t {
  kActivePixels,   // m = pixels with a nonzero count in the 3x3 window
  kClauseDensity,  // summed counts over the window divided by the clause count
};

inline constexpr double kDefaultLldFloorDb = -30.0;

/// 10 log10(m / 9) for m > 0, floor_db for m == 0.
double lld_value(int active, double floor_db = kDefaultLldFloorDb);

/// (rows - 2) x (cols - 2) grid over 3x3 windows at stride 1, binarizing the
/// counts first.
Eigen::ArrayXXd lld_heatmap(const CountGrid& counts, double floor_db = kDefaultLldFloorDb);
/// Variant selecting the numerator; kClauseDensity uses 10 log10(sum / (9 * clauses)).
Eigen::ArrayXXd lld_heatmap(const CountGrid& counts, int clauses, LldNumerator numerator,
                            double floor_db = kDefaultLldFloorDb);

Eigen::VectorXd mean_waveform(std::span<const seg::BeatWindow> beats);
Eigen::VectorXd mean_waveform(std::span<const Eigen::VectorXd> waveforms);

struct Overlay {
  Eigen::VectorXd waveform;  // one amplitude per column of the source grid
  seg::AmplitudeRange range;
};

/// Row of each overlay column in a grid with `rows` rows.
std::vector<int> overlay_rows(const Overlay& overlay, int rows);

void export_role_map(const CountGrid& counts, const std::optional<Overlay>& overlay,
                     const std::filesystem::path& path);
void export_heatmap(const Eigen::ArrayXXd& lld, const std::optional<Overlay>& overlay,
                    const std::filesystem::path& path, double floor_db = kDefaultLldFloorDb);

std::array<std::uint8_t, 3> heat_color(int ramp_index);

struct NetpbmImage {
  std::string magic;  // "P2" or "P3"
  int width = 0;
  int height = 0;
  int maxval = 0;
  std::vector<int> values;  // row-major, 3 per pixel for P3
};

NetpbmImage read_netpbm(const std::filesystem::path& path);

/// Per-polarity clause count, mean included-literal count and the 20 pixels
/// used by the most clauses.
std::string class_report(const tm::ClassBank& bank, std::string_view class_name, int rows = seg::kAmplitudeRows,
                         int cols = seg::kBeatLength);

}  // namespace tmpvc::interp
