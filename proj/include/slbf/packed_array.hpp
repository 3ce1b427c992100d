#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace slbf {

/// Fixed-width unsigned integers (0..64 bits each) packed back to back in
/// 64-bit words. Width 0 is allowed and stores nothing.
class PackedArray {
 public:
  PackedArray() = default;
  PackedArray(std::size_t count, unsigned width);

  std::uint64_t get(std::size_t index) const noexcept {
    if (width_ == 0) return 0;
    const std::size_t bit = index * width_;
    const std::size_t word = bit >> 6;
    const unsigned offset = bit & 63;
    std::uint64_t value = words_[word] >> offset;
    if (offset + width_ > 64) value |= words_[word + 1] << (64 - offset);
    return value & mask_;
  }

  void set(std::size_t index, std::uint64_t value) noexcept {
    if (width_ == 0) return;
    value &= mask_;
    const std::size_t bit = index * width_;
    const std::size_t word = bit >> 6;
    const unsigned offset = bit & 63;
    words_[word] = (words_[word] & ~(mask_ << offset)) | (value << offset);
    if (offset + width_ > 64) {
      const unsigned spill = 64 - offset;
      words_[word + 1] = (words_[word + 1] & ~(mask_ >> spill)) | (value >> spill);
    }
  }

  std::size_t size() const noexcept { return count_; }
  unsigned width() const noexcept { return width_; }
  std::size_t payload_bits() const noexcept { return count_ * width_; }

  std::span<const std::uint64_t> words() const noexcept { return words_; }
  /// Replaces the backing words; the length must match the current layout.
  void assign_words(std::span<const std::uint64_t> words);

  friend bool operator==(const PackedArray&, const PackedArray&) = default;

 private:
  std::size_t count_ = 0;
  unsigned width_ = 0;
  std::uint64_t mask_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace slbf
