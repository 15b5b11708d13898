#pragma once

// Model file layout (all integers little-endian):
//   "TMPVC"            5 bytes
//   version            u16 (currently 1)
//   q, n, o, N, T      u32 each
//   s                  IEEE-754 binary64
//   states             q * n * 2o bytes, class-major then clause-major, one
//                      byte per literal holding (state - 1)

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tmpvc/tsetlin.hpp"

namespace tmpvc::tm {

inline constexpr std::uint16_t kModelFormatVersion = 1;

std::vector<std::uint8_t> serialize(const MultiClassModel& model);
MultiClassModel deserialize(std::span<const std::uint8_t> bytes);

void save_model(const MultiClassModel& model, const std::filesystem::path& path);
MultiClassModel load_model(const std::filesystem::path& path);

/// One line per clause: "<class> <+|-> <clause>: x12 !x40 ...". Empty clauses
/// list nothing after the colon.
std::string export_text(const MultiClassModel& model);

}  // namespace tmpvc::tm
