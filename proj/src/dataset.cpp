#include "tmpvc/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "tmpvc/errors.hpp"

namespace tmpvc::data {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

}  // namespace

const char* label_name(BeatLabel label) {
  switch (label) {
    case BeatLabel::kNonPvc:
      return "Non-PVC";
    case BeatLabel::kPvcR:
      return "PVC_R";
    case BeatLabel::kPvcL:
      return "PVC_L";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// CSV ingestion

EcgRecord parse_record(std::istream& in, const std::string& source, std::string subject_id) {
  EcgRecord rec;
  rec.subject_id = std::move(subject_id);
  std::vector<double> samples;
  std::string line;
  std::size_t line_no = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      const auto body = trim(text.substr(1));
      constexpr std::string_view key = "sampling_rate=";
      if (body.starts_with(key)) {
        double fs = 0;
        if (!parse_number(trim(body.substr(key.size())), fs)) throw ParseError(source, line_no, "bad sampling rate");
        rec.sampling_rate = fs;
      }
      continue;
    }
    const auto fields = split_commas(text);
    if (first_content && fields.size() == 2 && lower(fields[0]) == "index") {
      first_content = false;
      continue;
    }
    first_content = false;
    if (fields.size() != 2) throw ParseError(source, line_no, "expected 2 fields 'index,mv'");
    std::int64_t index = 0;
    double mv = 0;
    if (!parse_number(fields[0], index)) throw ParseError(source, line_no, "non-integer sample index '" + std::string(fields[0]) + "'");
    if (!parse_number(fields[1], mv) || !std::isfinite(mv)) {
      throw ParseError(source, line_no, "non-numeric amplitude '" + std::string(fields[1]) + "'");
    }
    if (index != static_cast<std::int64_t>(samples.size())) {
      throw ParseError(source, line_no, "sample index " + std::to_string(index) + " out of sequence (expected " +
                                            std::to_string(samples.size()) + ")");
    }
    samples.push_back(mv);
  }
  if (rec.sampling_rate != kSamplingRateHz) {
    throw ParseError(source, 0, "sampling rate " + std::to_string(rec.sampling_rate) + " Hz is not 360 Hz");
  }
  rec.samples = Eigen::Map<const Eigen::VectorXd>(samples.data(), static_cast<Eigen::Index>(samples.size()));
  return rec;
}

EcgRecord load_record(const std::filesystem::path& path, std::string subject_id) {
  auto in = open_input(path);
  if (subject_id.empty()) {
    subject_id = path.stem().string();
  }
  return parse_record(in, path.string(), std::move(subject_id));
}

void write_record(const EcgRecord& record, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "# sampling_rate=" << record.sampling_rate << "\nindex,mv\n";
  char buf[64];
  for (Eigen::Index i = 0; i < record.samples.size(); ++i) {
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, record.samples[i]);
    out << i << ',' << std::string_view(buf, static_cast<std::size_t>(end - buf)) << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<BeatAnnotation> parse_annotations(std::istream& in, const std::string& source) {
  std::vector<BeatAnnotation> out;
  std::string line;
  std::size_t line_no = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto fields = split_commas(text);
    if (first_content && !fields.empty() && lower(fields[0]) == "index") {
      first_content = false;
      continue;
    }
    first_content = false;
    if (fields.size() < 2 || fields.size() > 3) throw ParseError(source, line_no, "expected 'index,symbol[,side]'");
    BeatAnnotation a;
    if (!parse_number(fields[0], a.sample_index) || a.sample_index < 0) {
      throw ParseError(source, line_no, "bad sample index '" + std::string(fields[0]) + "'");
    }
    if (fields[1].size() != 1) throw ParseError(source, line_no, "annotation symbol must be one character");
    a.symbol = fields[1].front();
    if (fields.size() == 3) {
      const auto side = fields[2];
      if (side == "R" || side == "r") {
        a.side = PvcSide::kRight;
      } else if (side == "L" || side == "l") {
        a.side = PvcSide::kLeft;
      } else if (!side.empty() && side != "?") {
        throw ParseError(source, line_no, "side must be R, L or empty");
      }
    }
    out.push_back(a);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const BeatAnnotation& x, const BeatAnnotation& y) { return x.sample_index < y.sample_index; });
  return out;
}

std::vector<BeatAnnotation> load_annotations(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_annotations(in, path.string());
}

void write_annotations(std::span<const BeatAnnotation> annotations, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "index,symbol,side\n";
  for (const auto& a : annotations) {
    out << a.sample_index << ',' << a.symbol << ',';
    if (a.side == PvcSide::kRight) out << 'R';
    if (a.side == PvcSide::kLeft) out << 'L';
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

// ---------------------------------------------------------------------------
// Labels

bool is_beat_symbol(char symbol) {
  static constexpr std::string_view kBeats = "NLRejAaJSVEF/fQ";
  return kBeats.find(symbol) != std::string_view::npos;
}

BeatLabel map_label(char symbol, PvcSide side) {
  if (!is_beat_symbol(symbol)) throw LabelError(std::string("unknown beat symbol '") + symbol + "'");
  if (symbol != 'V') return BeatLabel::kNonPvc;
  switch (side) {
    case PvcSide::kRight:
      return BeatLabel::kPvcR;
    case PvcSide::kLeft:
      return BeatLabel::kPvcL;
    case PvcSide::kUnknown:
      break;
  }
  throw LabelError("'V' beat without a side needs a beat window for the polarity heuristic");
}

BeatLabel map_label(char symbol, PvcSide side, const seg::BeatWindow& beat) {
  if (symbol == 'V' && side == PvcSide::kUnknown) side = pvc_polarity_heuristic(beat);
  return map_label(symbol, side);
}

double pvc_polarity_area(const seg::BeatWindow& beat) {
  if (beat.samples.size() != seg::kBeatLength) throw DimensionError("beat window must hold 320 samples");
  std::vector<double> head(beat.samples.data(), beat.samples.data() + 80);
  std::sort(head.begin(), head.end());
  const double baseline = 0.5 * (head[39] + head[40]);
  return (beat.samples.segment(104, 81).array() - baseline).sum();
}

PvcSide pvc_polarity_heuristic(const seg::BeatWindow& beat) {
  return pvc_polarity_area(beat) > 0.0 ? PvcSide::kRight : PvcSide::kLeft;
}

// ---------------------------------------------------------------------------
// Folds

int FoldPlan::fold_of(std::string_view subject) const {
  for (std::size_t f = 0; f < folds.size(); ++f) {
    if (std::find(folds[f].begin(), folds[f].end(), subject) != folds[f].end()) return static_cast<int>(f);
  }
  return -1;
}

std::size_t FoldPlan::subject_count() const {
  std::size_t n = 0;
  for (const auto& f : folds) n += f.size();
  return n;
}

FoldPlan make_folds(std::span<const std::string> subject_ids, int k, std::uint64_t seed) {
  if (k < 1) throw ConfigError("fold count must be positive");
  if (subject_ids.empty()) throw ConfigError("no subjects to split into folds");
  if (std::set<std::string>(subject_ids.begin(), subject_ids.end()).size() != subject_ids.size()) {
    throw ConfigError("subject ids must be unique");
  }
  const auto n = subject_ids.size();
  const auto kk = static_cast<std::size_t>(k);
  if (n % kk != 0) {
    throw ConfigError(std::to_string(n) + " subjects cannot be split into " + std::to_string(k) + " equal folds (" +
                      std::to_string(n % kk) + " left over)");
  }
  std::vector<std::string> shuffled(subject_ids.begin(), subject_ids.end());
  std::mt19937_64 rng(seed);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  FoldPlan plan;
  const auto per_fold = n / kk;
  for (std::size_t f = 0; f < kk; ++f) {
    plan.folds.emplace_back(shuffled.begin() + static_cast<std::ptrdiff_t>(f * per_fold),
                            shuffled.begin() + static_cast<std::ptrdiff_t>((f + 1) * per_fold));
  }
  return plan;
}

std::string fold_plan_to_text(const FoldPlan& plan) {
  std::string out;
  for (const auto& fold : plan.folds) {
    for (std::size_t i = 0; i < fold.size(); ++i) {
      if (i) out += ' ';
      out += fold[i];
    }
    out += '\n';
  }
  return out;
}

FoldPlan fold_plan_from_text(std::string_view text) {
  FoldPlan plan;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::istringstream words(line);
    std::vector<std::string> fold;
    for (std::string id; words >> id;) fold.push_back(id);
    plan.folds.push_back(std::move(fold));
  }
  return plan;
}

std::string subject_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "subject_%02d", index);
  return buf;
}

}  // namespace tmpvc::data
