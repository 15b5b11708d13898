#pragma once

// Biorthogonal 2.6 discrete wavelet transform with half-sample symmetric
// extension, and the band-zeroing denoiser built on it.
//
// One analysis level maps n samples to floor((n + 13) / 2) approximation and
// detail coefficients each:
//
//   a[i] = sum_j lo[j] * x~[2i + 1 - j],   d[i] = sum_j hi[j] * x~[2i + 1 - j]
//
// where x~ is x mirrored about both ends (x~[-1] = x[0], x~[n] = x[n-1], and so
// on, repeating for signals shorter than the filter). Synthesis keeps the
// valid part of the upsampled convolution and is exact for any length once the
// per-level lengths are stored.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tmpvc/errors.hpp"

namespace tmpvc::wavelet {

template <typename Scalar>
using Signal = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

inline constexpr int kFilterLength = 14;
inline constexpr int kDefaultLevels = 9;

template <typename Scalar>
struct FilterBank {
  std::array<Scalar, kFilterLength> dec_lo;
  std::array<Scalar, kFilterLength> dec_hi;
  std::array<Scalar, kFilterLength> rec_lo;
  std::array<Scalar, kFilterLength> rec_hi;

  static const FilterBank& bior26() {
    static const FilterBank bank = [] {
      constexpr double q = 0.3535533905932738;  // sqrt(2) / 4
      constexpr double h = 0.7071067811865476;  // sqrt(2) / 2
      constexpr std::array<double, kFilterLength> dec_lo = {
          0.0, -0.006905339660024878, 0.013810679320049757, 0.04695630968816917, -0.1077232986963881,
          -0.16987135563661201, 0.4474660099696121, 0.966747552403483, 0.4474660099696121, -0.16987135563661201,
          -0.1077232986963881, 0.04695630968816917, 0.013810679320049757, -0.006905339660024878};
      constexpr std::array<double, kFilterLength> dec_hi = {0, 0, 0, 0, 0, q, -h, q, 0, 0, 0, 0, 0, 0};
      constexpr std::array<double, kFilterLength> rec_lo = {0, 0, 0, 0, 0, q, h, q, 0, 0, 0, 0, 0, 0};
      constexpr std::array<double, kFilterLength> rec_hi = {
          0.0, 0.006905339660024878, 0.013810679320049757, -0.04695630968816917, -0.1077232986963881,
          0.16987135563661201, 0.4474660099696121, -0.966747552403483, 0.4474660099696121, 0.16987135563661201,
          -0.1077232986963881, -0.04695630968816917, 0.013810679320049757, 0.006905339660024878};
      FilterBank b{};
      for (int j = 0; j < kFilterLength; ++j) {
        b.dec_lo[j] = static_cast<Scalar>(dec_lo[j]);
        b.dec_hi[j] = static_cast<Scalar>(dec_hi[j]);
        b.rec_lo[j] = static_cast<Scalar>(rec_lo[j]);
        b.rec_hi[j] = static_cast<Scalar>(rec_hi[j]);
      }
      return b;
    }();
    return bank;
  }
};

/// approx holds a_L; details[k] holds d_{k+1}, so details.back() is the
/// deepest detail band.
template <typename Scalar>
struct WaveletDecomposition {
  Signal<Scalar> approx;
  std::vector<Signal<Scalar>> details;
  std::vector<Eigen::Index> input_lengths;  // input_lengths[k]: length fed into level k+1
  Eigen::Index original_length = 0;

  int levels() const noexcept { return static_cast<int>(details.size()); }
  const Signal<Scalar>& detail(int level) const { return details.at(static_cast<std::size_t>(level - 1)); }
  Signal<Scalar>& detail(int level) { return details.at(static_cast<std::size_t>(level - 1)); }
};

/// A band name: "a<L>" for the deepest approximation, "d<k>" for a detail.
struct Band {
  enum class Kind { kApprox, kDetail } kind;
  int level;

  static Band parse(const std::string& name) {
    if (name.size() < 2 || (name[0] != 'a' && name[0] != 'd')) throw std::invalid_argument("unknown band '" + name + "'");
    std::size_t used = 0;
    int level = 0;
    try {
      level = std::stoi(name.substr(1), &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("unknown band '" + name + "'");
    }
    if (used != name.size() - 1 || level < 1) throw std::invalid_argument("unknown band '" + name + "'");
    return {name[0] == 'a' ? Kind::kApprox : Kind::kDetail, level};
  }

  std::string name() const { return (kind == Kind::kApprox ? "a" : "d") + std::to_string(level); }

  auto operator<=>(const Band&) const = default;
};

inline const std::set<Band>& default_denoise_bands() {
  static const std::set<Band> bands = {{Band::Kind::kDetail, 1}, {Band::Kind::kDetail, 2}, {Band::Kind::kApprox, 9}};
  return bands;
}

namespace detail {

inline Eigen::Index mirror_index(Eigen::Index i, Eigen::Index n) {
  const Eigen::Index period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

template <typename Scalar>
void analyze_level(const Signal<Scalar>& x, const FilterBank<Scalar>& fb, Signal<Scalar>& approx,
                   Signal<Scalar>& detail) {
  const Eigen::Index n = x.size();
  const Eigen::Index m = (n + kFilterLength - 1) / 2;
  approx.resize(m);
  detail.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    Scalar a = 0;
    Scalar d = 0;
    const Eigen::Index base = 2 * i + 1;
    if (base - (kFilterLength - 1) >= 0 && base < n) {
      for (int j = 0; j < kFilterLength; ++j) {
        const Scalar v = x[base - j];
        a += fb.dec_lo[j] * v;
        d += fb.dec_hi[j] * v;
      }
    } else {
      for (int j = 0; j < kFilterLength; ++j) {
        const Scalar v = x[mirror_index(base - j, n)];
        a += fb.dec_lo[j] * v;
        d += fb.dec_hi[j] * v;
      }
    }
    approx[i] = a;
    detail[i] = d;
  }
}

template <typename Scalar>
Signal<Scalar> synthesize_level(const Signal<Scalar>& approx, const Signal<Scalar>& detail,
                                const FilterBank<Scalar>& fb, Eigen::Index out_length) {
  if (approx.size() != detail.size()) throw DimensionError("approximation and detail lengths differ");
  const Eigen::Index nc = approx.size();
  const Eigen::Index full = 2 * nc - kFilterLength + 2;
  if (out_length > full || out_length < full - 1) {
    throw DimensionError("inconsistent coefficient length " + std::to_string(nc) + " for output length " +
                         std::to_string(out_length));
  }
  Signal<Scalar> out(out_length);
  for (Eigen::Index m = 0; m < out_length; ++m) {
    // Filter taps j = m + F - 2 - 2k with 0 <= j < F.
    const Eigen::Index t = m + kFilterLength - 2;
    Eigen::Index k_lo = (t - (kFilterLength - 1) + 1) / 2;
    if (k_lo < 0) k_lo = 0;
    const Eigen::Index k_hi = std::min<Eigen::Index>(t / 2, nc - 1);
    Scalar s = 0;
    for (Eigen::Index k = k_lo; k <= k_hi; ++k) {
      const auto j = static_cast<std::size_t>(t - 2 * k);
      s += approx[k] * fb.rec_lo[j] + detail[k] * fb.rec_hi[j];
    }
    out[m] = s;
  }
  return out;
}

}  // namespace detail

template <typename Derived>
WaveletDecomposition<typename Derived::Scalar> dwt_decompose(const Eigen::MatrixBase<Derived>& signal,
                                                             int levels = kDefaultLevels) {
  using Scalar = typename Derived::Scalar;
  if (levels < 1) throw std::invalid_argument("level count must be >= 1");
  const Eigen::Index n = signal.size();
  if (levels >= 63 || n < (Eigen::Index{1} << levels)) {
    throw std::invalid_argument("signal of " + std::to_string(n) + " samples is too short for " +
                                std::to_string(levels) + " levels (need >= " +
                                std::to_string(Eigen::Index{1} << std::min(levels, 62)) + ")");
  }
  if (!signal.allFinite()) throw std::invalid_argument("signal contains non-finite samples");

  const auto& fb = FilterBank<Scalar>::bior26();
  WaveletDecomposition<Scalar> dec;
  dec.original_length = n;
  Signal<Scalar> current = signal;
  for (int level = 1; level <= levels; ++level) {
    Signal<Scalar> approx;
    Signal<Scalar> detail;
    detail::analyze_level(current, fb, approx, detail);
    dec.input_lengths.push_back(current.size());
    dec.details.push_back(std::move(detail));
    current = std::move(approx);
  }
  dec.approx = std::move(current);
  return dec;
}

template <typename Scalar>
Signal<Scalar> idwt_reconstruct(const WaveletDecomposition<Scalar>& dec) {
  const int levels = dec.levels();
  if (levels < 1 || dec.input_lengths.size() != static_cast<std::size_t>(levels)) {
    throw DimensionError("decomposition is missing per-level lengths");
  }
  if (dec.input_lengths.front() != dec.original_length) throw DimensionError("original length mismatch");
  const auto& fb = FilterBank<Scalar>::bior26();
  Signal<Scalar> current = dec.approx;
  for (int level = levels; level >= 1; --level) {
    const auto& d = dec.detail(level);
    if (current.size() != d.size()) {
      throw DimensionError("level " + std::to_string(level) + ": approximation has " +
                           std::to_string(current.size()) + " coefficients, detail has " + std::to_string(d.size()));
    }
    current = detail::synthesize_level(current, d, fb, dec.input_lengths[static_cast<std::size_t>(level - 1)]);
  }
  return current;
}

/// Replaces the named bands by zeros of the same length.
template <typename Scalar>
WaveletDecomposition<Scalar> zero_bands(WaveletDecomposition<Scalar> dec, const std::set<Band>& bands) {
  for (const auto& band : bands) {
    if (band.kind == Band::Kind::kApprox) {
      if (band.level != dec.levels()) throw std::invalid_argument("unknown band '" + band.name() + "'");
      dec.approx.setZero();
    } else {
      if (band.level < 1 || band.level > dec.levels()) throw std::invalid_argument("unknown band '" + band.name() + "'");
      dec.detail(band.level).setZero();
    }
  }
  return dec;
}

/// 9-level decomposition, zero {d1, d2, a9}, reconstruct.
template <typename Derived>
Signal<typename Derived::Scalar> denoise(const Eigen::MatrixBase<Derived>& signal) {
  if (signal.size() < (Eigen::Index{1} << kDefaultLevels)) {
    throw std::invalid_argument("denoise needs at least 512 samples, got " + std::to_string(signal.size()));
  }
  return idwt_reconstruct(zero_bands(dwt_decompose(signal, kDefaultLevels), default_denoise_bands()));
}

}  // namespace tmpvc::wavelet
