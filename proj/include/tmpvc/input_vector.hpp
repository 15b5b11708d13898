#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace tmpvc {

/// Boolean feature vector packed 64 bits per word, LSB first. Bits past size()
/// in the last word are always zero.
class InputVector {
 public:
  InputVector() = default;
  explicit InputVector(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

  static InputVector from_bools(std::span<const bool> bits);
  static InputVector from_bytes(std::span<const std::uint8_t> bytes);  // nonzero byte = 1

  std::size_t size() const noexcept { return size_; }
  std::size_t word_count() const noexcept { return words_.size(); }

  bool operator[](std::size_t k) const noexcept { return (words_[k >> 6] >> (k & 63)) & 1U; }
  void set(std::size_t k, bool value) noexcept {
    const std::uint64_t bit = std::uint64_t{1} << (k & 63);
    if (value) {
      words_[k >> 6] |= bit;
    } else {
      words_[k >> 6] &= ~bit;
    }
  }

  // Literal view: index 2k is x_k, 2k+1 is its negation.
  bool literal(std::size_t l) const noexcept { return (*this)[l >> 1] != static_cast<bool>(l & 1); }
  std::size_t literal_count() const noexcept { return 2 * size_; }

  std::size_t popcount() const noexcept;

  std::span<const std::uint64_t> words() const noexcept { return words_; }

  bool operator==(const InputVector&) const = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace tmpvc
