#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tmpvc/dataset.hpp"
#include "tmpvc/segmentation.hpp"

namespace tmpvc::data {

struct PreprocessOptions {
  bool denoise = true;
  double lo_percent = 1.0;
  double hi_percent = 99.0;
};

struct PreprocessStats {
  std::size_t annotations = 0;
  std::size_t beats = 0;
  std::size_t excluded_symbols = 0;  // non-beat or unknown annotation codes
  std::size_t skipped_edges = 0;     // window ran past the record
  std::size_t heuristic_labels = 0;  // 'V' beats labelled by polarity heuristic

  PreprocessStats& operator+=(const PreprocessStats& o);
};

struct PreprocessResult {
  std::vector<LabeledBeat> beats;
  std::vector<seg::BeatWindow> windows;  // denoised windows, parallel to beats
  PreprocessStats stats;
};

/// Denoise the whole record, cut a window at every beat annotation, label it,
/// and rasterize it with the record's percentile amplitude range.
PreprocessResult preprocess_record(const EcgRecord& record, std::span<const BeatAnnotation> annotations,
                                   const PreprocessOptions& options = {});

}  // namespace tmpvc::data
