#pragma once

// Record and annotation ingestion, beat labelling, subject-wise folds and a
// synthetic three-class beat generator.
//
// CSV formats:
//   record       "index,mv"              one sample per line, index = 0, 1, ...
//   annotations  "index,symbol[,side]"   side is R, L or empty
// A header line naming the columns is optional. Lines starting with '#' are
// comments; a record may carry "# sampling_rate=<Hz>" which must be 360.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "tmpvc/input_vector.hpp"
#include "tmpvc/segmentation.hpp"

namespace tmpvc::data {

inline constexpr double kSamplingRateHz = 360.0;
inline constexpr int kClassCount = 3;

enum class BeatLabel : std::uint8_t { kNonPvc = 0, kPvcR = 1, kPvcL = 2 };
enum class PvcSide : std::uint8_t { kUnknown, kRight, kLeft };

const char* label_name(BeatLabel label);

struct EcgRecord {
  std::string subject_id;
  double sampling_rate = kSamplingRateHz;
  Eigen::VectorXd samples;  // mV
};

struct BeatAnnotation {
  std::int64_t sample_index = 0;
  char symbol = 'N';
  PvcSide side = PvcSide::kUnknown;

  bool operator==(const BeatAnnotation&) const = default;
};

struct LabeledBeat {
  InputVector input;
  BeatLabel label = BeatLabel::kNonPvc;
  std::string subject_id;
};

EcgRecord parse_record(std::istream& in, const std::string& source, std::string subject_id);
/// Subject id defaults to the file stem.
EcgRecord load_record(const std::filesystem::path& path, std::string subject_id = {});
void write_record(const EcgRecord& record, const std::filesystem::path& path);

/// Annotations come back sorted by sample index.
std::vector<BeatAnnotation> parse_annotations(std::istream& in, const std::string& source);
std::vector<BeatAnnotation> load_annotations(const std::filesystem::path& path);
void write_annotations(std::span<const BeatAnnotation> annotations, const std::filesystem::path& path);

/// True for MIT-BIH beat annotation codes (AAMI N, S, V, F and Q groups).
bool is_beat_symbol(char symbol);

/// 'V' becomes PVC_R or PVC_L from its side; every other beat symbol is
/// NON_PVC. Throws LabelError for non-beat symbols and for 'V' without a side.
BeatLabel map_label(char symbol, PvcSide side);
/// As above, but a 'V' without a side is resolved by pvc_polarity_heuristic.
BeatLabel map_label(char symbol, PvcSide side, const seg::BeatWindow& beat);

/// Signed area of (sample - baseline) over columns [104, 184]; baseline is the
/// median of the first 80 samples. Positive area means R, otherwise L.
PvcSide pvc_polarity_heuristic(const seg::BeatWindow& beat);
double pvc_polarity_area(const seg::BeatWindow& beat);

struct FoldPlan {
  std::vector<std::vector<std::string>> folds;

  /// Index of the fold holding a subject, -1 when absent.
  int fold_of(std::string_view subject) const;
  std::size_t subject_count() const;
};

/// Seeded shuffle then contiguous chunks of |subjects| / k. Throws
/// ConfigError when the count is not divisible by k or ids repeat.
FoldPlan make_folds(std::span<const std::string> subject_ids, int k, std::uint64_t seed);

/// One fold per line, subject ids separated by single spaces.
std::string fold_plan_to_text(const FoldPlan& plan);
FoldPlan fold_plan_from_text(std::string_view text);

// --- synthetic beats -------------------------------------------------------

/// A noise-free-by-default 320-sample beat of the given class with the R
/// reference at offset 144. Shape parameters are jittered from rng.
Eigen::VectorXd synth_beat(BeatLabel label, double noise_mv, std::mt19937_64& rng);

struct SyntheticRecord {
  EcgRecord record;
  std::vector<BeatAnnotation> annotations;  // symbol 'N' or 'V', side set for 'V'
};

/// n_per_class beats of each class spread over `subjects` records; beat i of
/// each class goes to subject i % subjects.
std::vector<SyntheticRecord> synth_records(int n_per_class, double noise_mv, std::uint64_t seed, int subjects);

/// Synthetic records segmented and rasterized with each record's 1st/99th
/// percentile amplitude range (no denoising).
std::vector<LabeledBeat> synth_dataset(int n_per_class, double noise_mv, std::uint64_t seed, int subjects = 36);

std::string subject_name(int index);

}  // namespace tmpvc::data
