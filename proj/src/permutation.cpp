#include "slbf/permutation.hpp"

#include <bit>
#include <stdexcept>

#include "slbf/hashing.hpp"

namespace slbf {

KeyedPermutation::KeyedPermutation(std::uint64_t domain, std::uint64_t seed) : domain_(domain) {
  if (domain == 0) throw std::invalid_argument("permutation domain must be non-empty");
  unsigned bits = static_cast<unsigned>(std::bit_width(domain - 1));
  if (bits < 2) bits = 2;
  if (bits & 1) ++bits;
  half_bits_ = bits / 2;
  half_mask_ = half_bits_ >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << half_bits_) - 1;
  std::uint64_t state = seed;
  for (auto& key : keys_) {
    state = mix64(state);
    key = state;
  }
}

std::uint64_t KeyedPermutation::round(int r, std::uint64_t half) const noexcept {
  return mix64(half ^ keys_[r]) & half_mask_;
}

std::uint64_t KeyedPermutation::feistel(std::uint64_t x) const noexcept {
  std::uint64_t left = x >> half_bits_;
  std::uint64_t right = x & half_mask_;
  for (int r = 0; r < 4; ++r) {
    const std::uint64_t next = left ^ round(r, right);
    left = right;
    right = next;
  }
  return (left << half_bits_) | right;
}

std::uint64_t KeyedPermutation::feistel_inverse(std::uint64_t y) const noexcept {
  std::uint64_t left = y >> half_bits_;
  std::uint64_t right = y & half_mask_;
  for (int r = 3; r >= 0; --r) {
    const std::uint64_t prev = right ^ round(r, left);
    right = left;
    left = prev;
  }
  return (left << half_bits_) | right;
}

}  // namespace slbf
