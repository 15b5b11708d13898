#include "tmpvc/beat_io.hpp"

#include <array>
#include <fstream>
#include <iterator>
#include <limits>

#include "tmpvc/errors.hpp"

namespace tmpvc::data {

namespace {

constexpr std::array<char, 6> kMagic = {'T', 'M', 'B', 'E', 'A', 'T'};

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}

}  // namespace

std::vector<std::uint8_t> encode_beats(std::span<const LabeledBeat> beats, std::size_t width) {
  if (beats.size() > std::numeric_limits<std::uint32_t>::max() || width > std::numeric_limits<std::uint32_t>::max()) {
    throw ConfigError("beat file too large");
  }
  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(beats.size()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(width));
  const std::size_t bitmap_bytes = (width + 7) / 8;
  for (const auto& beat : beats) {
    if (beat.input.size() != width) throw DimensionError("beat width differs from file width");
    if (beat.subject_id.size() > std::numeric_limits<std::uint16_t>::max()) throw ConfigError("subject id too long");
    out.push_back(static_cast<std::uint8_t>(beat.label));
    put_le<std::uint16_t>(out, static_cast<std::uint16_t>(beat.subject_id.size()));
    out.insert(out.end(), beat.subject_id.begin(), beat.subject_id.end());
    const auto words = beat.input.words();
    for (std::size_t b = 0; b < bitmap_bytes; ++b) out.push_back(static_cast<std::uint8_t>(words[b / 8] >> (8 * (b % 8))));
  }
  return out;
}

std::vector<LabeledBeat> decode_beats(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  auto take = [&](std::size_t n) {
    if (bytes.size() - pos < n) throw FormatError("beat stream truncated at byte " + std::to_string(pos));
    auto s = bytes.subspan(pos, n);
    pos += n;
    return s;
  };
  auto u32 = [&] {
    auto s = take(4);
    return static_cast<std::uint32_t>(s[0]) | static_cast<std::uint32_t>(s[1]) << 8 |
           static_cast<std::uint32_t>(s[2]) << 16 | static_cast<std::uint32_t>(s[3]) << 24;
  };
  const auto magic = take(kMagic.size());
  if (!std::equal(magic.begin(), magic.end(), kMagic.begin())) throw FormatError("not a beat file (bad magic)");
  const std::uint32_t count = u32();
  const std::uint32_t width = u32();
  const std::size_t bitmap_bytes = (static_cast<std::size_t>(width) + 7) / 8;

  std::vector<LabeledBeat> beats;
  beats.reserve(std::min<std::size_t>(count, bytes.size()));
  for (std::uint32_t i = 0; i < count; ++i) {
    LabeledBeat beat;
    const auto label = take(1)[0];
    if (label >= kClassCount) throw FormatError("beat " + std::to_string(i) + ": label " + std::to_string(label) + " out of range");
    beat.label = static_cast<BeatLabel>(label);
    const auto len_bytes = take(2);
    const std::size_t len = static_cast<std::size_t>(len_bytes[0]) | static_cast<std::size_t>(len_bytes[1]) << 8;
    const auto id = take(len);
    beat.subject_id.assign(id.begin(), id.end());
    const auto bitmap = take(bitmap_bytes);
    beat.input = InputVector(width);
    for (std::size_t k = 0; k < width; ++k) {
      if ((bitmap[k / 8] >> (k % 8)) & 1U) beat.input.set(k, true);
    }
    beats.push_back(std::move(beat));
  }
  if (pos != bytes.size()) throw FormatError("trailing bytes after last beat");
  return beats;
}

void write_beats(std::span<const LabeledBeat> beats, const std::filesystem::path& path, std::size_t width) {
  const auto bytes = encode_beats(beats, width);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<LabeledBeat> read_beats(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_beats(bytes);
}

}  // namespace tmpvc::data
