#include "tmpvc/input_vector.hpp"

#include <bit>

namespace tmpvc {

InputVector InputVector::from_bools(std::span<const bool> bits) {
  InputVector v(bits.size());
  for (std::size_t k = 0; k < bits.size(); ++k) {
    if (bits[k]) v.set(k, true);
  }
  return v;
}

InputVector InputVector::from_bytes(std::span<const std::uint8_t> bytes) {
  InputVector v(bytes.size());
  for (std::size_t k = 0; k < bytes.size(); ++k) {
    if (bytes[k] != 0) v.set(k, true);
  }
  return v;
}

std::size_t InputVector::popcount() const noexcept {
  std::size_t total = 0;
  for (auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

}  // namespace tmpvc
