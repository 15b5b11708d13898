#include "tmpvc/model_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "tmpvc/errors.hpp"

namespace tmpvc::tm {

namespace {

constexpr std::array<char, 5> kMagic = {'T', 'M', 'P', 'V', 'C'};

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::span<const std::uint8_t> take(std::size_t n) {
    if (bytes_.size() - pos_ < n) throw FormatError("model stream truncated at byte " + std::to_string(pos_));
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  template <typename T>
  T le() {
    auto raw = take(sizeof(T));
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(static_cast<T>(raw[i]) << (8 * i));
    return value;
  }

  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

int checked_int(std::uint32_t v, const char* what) {
  if (v > static_cast<std::uint32_t>(std::numeric_limits<int>::max())) {
    throw FormatError(std::string(what) + " out of range");
  }
  return static_cast<int>(v);
}

}  // namespace

std::vector<std::uint8_t> serialize(const MultiClassModel& model) {
  const auto& p = model.params();
  std::vector<std::uint8_t> out;
  const std::size_t literal_count = 2 * p.input_width;
  out.reserve(kMagic.size() + 2 + 5 * 4 + 8 +
              static_cast<std::size_t>(p.classes) * static_cast<std::size_t>(p.clauses_per_class) * literal_count);
  out.insert(out.end(), kMagic.begin(), kMagic.end());
  put_le<std::uint16_t>(out, kModelFormatVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(p.classes));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(p.clauses_per_class));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(p.input_width));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(p.states_per_action));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(p.margin));
  put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(p.specificity));
  for (int c = 0; c < p.classes; ++c) {
    for (const auto& clause : model.bank(c).clauses()) {
      const auto raw = clause.raw_states();
      out.insert(out.end(), raw.begin(), raw.end());
    }
  }
  return out;
}

MultiClassModel deserialize(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  const auto magic = in.take(kMagic.size());
  if (!std::equal(magic.begin(), magic.end(), kMagic.begin())) throw FormatError("not a model file (bad magic)");
  const auto version = in.le<std::uint16_t>();
  if (version != kModelFormatVersion) {
    throw VersionError("model format version " + std::to_string(version) + " is not supported (expected " +
                       std::to_string(kModelFormatVersion) + ")");
  }
  Hyperparameters p;
  p.classes = checked_int(in.le<std::uint32_t>(), "class count");
  p.clauses_per_class = checked_int(in.le<std::uint32_t>(), "clause count");
  p.input_width = in.le<std::uint32_t>();
  p.states_per_action = checked_int(in.le<std::uint32_t>(), "states per action");
  p.margin = checked_int(in.le<std::uint32_t>(), "margin");
  p.specificity = std::bit_cast<double>(in.le<std::uint64_t>());

  const std::size_t literal_count = 2 * p.input_width;
  const std::size_t expected =
      static_cast<std::size_t>(p.classes) * static_cast<std::size_t>(p.clauses_per_class) * literal_count;
  if (in.remaining() < expected) throw FormatError("model stream truncated in state arrays");
  if (in.remaining() > expected) throw FormatError("trailing bytes after model state arrays");

  MultiClassModel model = [&] {
    try {
      return MultiClassModel(p);
    } catch (const ConfigError& e) {
      throw FormatError(std::string("invalid model header: ") + e.what());
    }
  }();
  for (int c = 0; c < p.classes; ++c) {
    for (auto& clause : model.bank(c).clauses()) clause.assign_raw_states(in.take(literal_count));
  }
  return model;
}

void save_model(const MultiClassModel& model, const std::filesystem::path& path) {
  const auto bytes = serialize(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

MultiClassModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

std::string export_text(const MultiClassModel& model) {
  std::ostringstream out;
  for (int c = 0; c < model.class_count(); ++c) {
    const auto& bank = model.bank(c);
    for (std::size_t j = 0; j < bank.size(); ++j) {
      const auto& clause = bank.clause(j);
      out << c << ' ' << (clause.polarity() == Polarity::kPositive ? '+' : '-') << ' ' << j << ':';
      for (const auto& lit : included_literals(clause)) {
        out << ' ' << (lit.form == LiteralForm::kNegated ? "!x" : "x") << lit.pixel;
      }
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace tmpvc::tm
