#include "tmpvc/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tmpvc/errors.hpp"

namespace tmpvc::seg {

Segmentation segment_beats(const Eigen::Ref<const Eigen::VectorXd>& signal, std::span<const std::int64_t> r_peaks) {
  if (!std::is_sorted(r_peaks.begin(), r_peaks.end())) throw std::invalid_argument("R peaks must be sorted");
  Segmentation out;
  const auto n = static_cast<std::int64_t>(signal.size());
  for (std::size_t i = 0; i < r_peaks.size(); ++i) {
    const std::int64_t r = r_peaks[i];
    const std::int64_t begin = r - kSamplesBefore;
    const std::int64_t end = r + kSamplesAfter;
    if (begin < 0 || end > n) {
      ++out.skipped;
      continue;
    }
    out.beats.push_back({signal.segment(begin, kBeatLength), r});
    out.peak_ids.push_back(i);
  }
  return out;
}

int BeatMatrix::row_of(int col) const {
  for (int r = 0; r < kAmplitudeRows; ++r) {
    if (grid_(r, col)) return r;
  }
  return -1;
}

int quantize_row(double amplitude, const AmplitudeRange& range) {
  if (!(range.hi > range.lo)) throw std::invalid_argument("degenerate amplitude range");
  const double clipped = std::clamp(amplitude, range.lo, range.hi);
  const double u = (clipped - range.lo) / (range.hi - range.lo);
  return static_cast<int>(std::lround((1.0 - u) * (kAmplitudeRows - 1)));
}

BeatMatrix rasterize(const BeatWindow& beat, const AmplitudeRange& range) {
  if (!(range.hi > range.lo)) {
    throw std::invalid_argument("degenerate amplitude range [" + std::to_string(range.lo) + ", " +
                                std::to_string(range.hi) + "]");
  }
  if (beat.samples.size() != kBeatLength) throw DimensionError("beat window must hold 320 samples");
  BeatMatrix m;
  m.range() = range;
  for (int t = 0; t < kBeatLength; ++t) m.set(quantize_row(beat.samples[t], range), t, true);
  return m;
}

InputVector flatten(const BeatMatrix& matrix) {
  InputVector bits(kBeatBits);
  for (int r = 0; r < kAmplitudeRows; ++r) {
    for (int c = 0; c < kBeatLength; ++c) {
      if (matrix(r, c)) bits.set(static_cast<std::size_t>(r) * kBeatLength + static_cast<std::size_t>(c), true);
    }
  }
  return bits;
}

BeatMatrix unflatten(const InputVector& bits) {
  if (bits.size() != kBeatBits) throw DimensionError("beat bitmap must hold 32000 bits");
  BeatMatrix m;
  for (int r = 0; r < kAmplitudeRows; ++r) {
    for (int c = 0; c < kBeatLength; ++c) {
      if (bits[static_cast<std::size_t>(r) * kBeatLength + static_cast<std::size_t>(c)]) m.set(r, c, true);
    }
  }
  return m;
}

AmplitudeRange percentile_range(const Eigen::Ref<const Eigen::VectorXd>& signal, double lo_percent,
                                double hi_percent) {
  if (signal.size() == 0) throw std::invalid_argument("cannot take percentiles of an empty signal");
  std::vector<double> sorted(signal.data(), signal.data() + signal.size());
  std::sort(sorted.begin(), sorted.end());
  auto at = [&](double pct) {
    const double pos = pct / 100.0 * static_cast<double>(sorted.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(i);
    if (i + 1 >= sorted.size()) return sorted.back();
    return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
  };
  return {at(lo_percent), at(hi_percent)};
}

Eigen::VectorXd raster_waveform(const BeatMatrix& matrix) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(kBeatLength);
  for (int c = 0; c < kBeatLength; ++c) {
    double sum = 0.0;
    int count = 0;
    for (int r = 0; r < kAmplitudeRows; ++r) {
      if (matrix(r, c)) {
        sum += r;
        ++count;
      }
    }
    const double row = count > 0 ? sum / count : (kAmplitudeRows - 1) / 2.0;
    out[c] = 1.0 - row / (kAmplitudeRows - 1);
  }
  return out;
}

}  // namespace tmpvc::seg
