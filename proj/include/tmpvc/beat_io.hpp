#pragma once

// Beat file layout (integers little-endian):
//   "TMBEAT"   6 bytes
//   count      u32
//   width      u32   bits per beat (32,000 for rasterized beats)
//   per beat:  label u8, subject id length u16, subject id bytes,
//              ceil(width / 8) bitmap bytes, bit k at byte k / 8, bit k % 8 (LSB first)

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "tmpvc/dataset.hpp"

namespace tmpvc::data {

std::vector<std::uint8_t> encode_beats(std::span<const LabeledBeat> beats, std::size_t width);
std::vector<LabeledBeat> decode_beats(std::span<const std::uint8_t> bytes);

void write_beats(std::span<const LabeledBeat> beats, const std::filesystem::path& path,
                 std::size_t width = seg::kBeatBits);
std::vector<LabeledBeat> read_beats(const std::filesystem::path& path);

}  // namespace tmpvc::data
