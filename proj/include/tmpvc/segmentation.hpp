#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "tmpvc/input_vector.hpp"

namespace tmpvc::seg {

inline constexpr int kSamplesBefore = 144;
inline constexpr int kSamplesAfter = 176;
inline constexpr int kBeatLength = kSamplesBefore + kSamplesAfter;  // 320
inline constexpr int kAmplitudeRows = 100;
inline constexpr std::size_t kBeatBits = static_cast<std::size_t>(kAmplitudeRows) * kBeatLength;  // 32,000

/// 320 samples with the R reference at offset 144.
struct BeatWindow {
  static constexpr int r_index = kSamplesBefore;

  Eigen::VectorXd samples;
  std::int64_t source_index = 0;  // R position in the source record
};

struct AmplitudeRange {
  double lo = 0.0;
  double hi = 1.0;
};

struct Segmentation {
  std::vector<BeatWindow> beats;
  std::vector<std::size_t> peak_ids;  // beats[i] came from r_peaks[peak_ids[i]]
  std::size_t skipped = 0;            // peaks whose window overran the record
};

/// One window [r - 144, r + 176) per peak. Throws std::invalid_argument when
/// the peaks are not sorted.
Segmentation segment_beats(const Eigen::Ref<const Eigen::VectorXd>& signal, std::span<const std::int64_t> r_peaks);

/// 100 x 320 Boolean raster; row 0 is the top (largest amplitude).
class BeatMatrix {
 public:
  using Grid = Eigen::Array<bool, kAmplitudeRows, Eigen::Dynamic>;

  BeatMatrix() : grid_(Grid::Zero(kAmplitudeRows, kBeatLength)) {}

  bool operator()(int row, int col) const { return grid_(row, col); }
  void set(int row, int col, bool value) { grid_(row, col) = value; }

  const Grid& grid() const noexcept { return grid_; }
  AmplitudeRange& range() noexcept { return range_; }
  const AmplitudeRange& range() const noexcept { return range_; }

  /// Index of the first set row in a column, -1 when the column is empty.
  int row_of(int col) const;

  bool operator==(const BeatMatrix& other) const { return (grid_ == other.grid_).all(); }

 private:
  Grid grid_;
  AmplitudeRange range_;
};

/// Row index for one amplitude: clip to [lo, hi], u = (a - lo) / (hi - lo),
/// row = round((1 - u) * 99).
int quantize_row(double amplitude, const AmplitudeRange& range);

BeatMatrix rasterize(const BeatWindow& beat, const AmplitudeRange& range);

/// Row-major flattening: bit index = row * 320 + col.
InputVector flatten(const BeatMatrix& matrix);
BeatMatrix unflatten(const InputVector& bits);

/// Linear-interpolated percentiles of the samples, used as the quantization
/// range of a record.
AmplitudeRange percentile_range(const Eigen::Ref<const Eigen::VectorXd>& signal, double lo_percent = 1.0,
                                double hi_percent = 99.0);

/// Recovers an approximate waveform in normalized units [0, 1] from a raster
/// (1 = top row), averaging the set rows of each column.
Eigen::VectorXd raster_waveform(const BeatMatrix& matrix);

}  // namespace tmpvc::seg
