#include "tmpvc/pipeline.hpp"

#include "tmpvc/errors.hpp"
#include "tmpvc/wavelet.hpp"

namespace tmpvc::data {

PreprocessStats& PreprocessStats::operator+=(const PreprocessStats& o) {
  annotations += o.annotations;
  beats += o.beats;
  excluded_symbols += o.excluded_symbols;
  skipped_edges += o.skipped_edges;
  heuristic_labels += o.heuristic_labels;
  return *this;
}

PreprocessResult preprocess_record(const EcgRecord& record, std::span<const BeatAnnotation> annotations,
                                   const PreprocessOptions& options) {
  PreprocessResult out;
  out.stats.annotations = annotations.size();

  std::vector<const BeatAnnotation*> beats;
  std::vector<std::int64_t> peaks;
  for (const auto& a : annotations) {
    if (!is_beat_symbol(a.symbol)) {
      ++out.stats.excluded_symbols;
      continue;
    }
    if (a.sample_index >= record.samples.size()) {
      throw ConfigError("annotation at sample " + std::to_string(a.sample_index) + " lies past the end of record " +
                        record.subject_id);
    }
    beats.push_back(&a);
    peaks.push_back(a.sample_index);
  }
  if (beats.empty()) return out;

  const Eigen::VectorXd signal = options.denoise ? wavelet::denoise(record.samples) : record.samples;
  const auto range = seg::percentile_range(signal, options.lo_percent, options.hi_percent);
  auto segmentation = seg::segment_beats(signal, peaks);
  out.stats.skipped_edges = segmentation.skipped;

  for (std::size_t i = 0; i < segmentation.beats.size(); ++i) {
    const auto& a = *beats[segmentation.peak_ids[i]];
    auto& window = segmentation.beats[i];
    if (a.symbol == 'V' && a.side == PvcSide::kUnknown) ++out.stats.heuristic_labels;
    const BeatLabel label = map_label(a.symbol, a.side, window);
    out.beats.push_back({seg::flatten(seg::rasterize(window, range)), label, record.subject_id});
    out.windows.push_back(std::move(window));
  }
  out.stats.beats = out.beats.size();
  return out;
}

}  // namespace tmpvc::data
