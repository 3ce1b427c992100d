#pragma once

#include <array>
#include <cstdint>

namespace slbf {

/// Seeded bijection on [0, domain): a four-round balanced Feistel network over
/// the smallest even bit width covering the domain, restricted to the domain
/// by cycle walking. The covering width is < 4 * domain, so a walk takes fewer
/// than four rounds on average.
class KeyedPermutation {
 public:
  KeyedPermutation() = default;
  KeyedPermutation(std::uint64_t domain, std::uint64_t seed);

  std::uint64_t forward(std::uint64_t x) const noexcept {
    do {
      x = feistel(x);
    } while (x >= domain_);
    return x;
  }

  std::uint64_t inverse(std::uint64_t y) const noexcept {
    do {
      y = feistel_inverse(y);
    } while (y >= domain_);
    return y;
  }

  std::uint64_t domain() const noexcept { return domain_; }

 private:
  std::uint64_t round(int r, std::uint64_t half) const noexcept;
  std::uint64_t feistel(std::uint64_t x) const noexcept;
  std::uint64_t feistel_inverse(std::uint64_t y) const noexcept;

  std::uint64_t domain_ = 1;
  unsigned half_bits_ = 1;
  std::uint64_t half_mask_ = 1;
  std::array<std::uint64_t, 4> keys_{};
};

}  // namespace slbf
