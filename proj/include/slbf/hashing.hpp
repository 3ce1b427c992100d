#pragma once

#include <cstdint>
#include <random>

namespace slbf {

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
bool is_prime(std::uint64_t value);

/// Smallest prime >= value. Throws InvalidParams past the largest 64-bit prime.
std::uint64_t next_prime(std::uint64_t value);

/// SplitMix64 finalizer. Used for seed derivation and domain separation only;
/// it is not the fingerprint family.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Uniform draw from [0, bound) by rejection. std::uniform_int_distribution is
/// implementation-defined, so it cannot be used where output must be
/// reproducible across standard libraries.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

/// Carter-Wegman family h_a(x) = ((a x mod p) mod R).
///
/// Seeding contract: `create(u, R, seed)` picks p = next_prime(max(u, R)) and
/// draws a = 1 + uniform_below(std::mt19937_64(seed), p - 1). The generator
/// and the rejection rule together define the wire-level reproducibility of
/// every filter built from a seed.
class UniversalHash {
 public:
  /// Throws InvalidParams unless p is prime, 1 <= a < p and 1 <= range <= p.
  UniversalHash(std::uint64_t p, std::uint64_t a, std::uint64_t range);

  static UniversalHash create(std::uint64_t universe, std::uint64_t range, std::uint64_t seed);

  /// Requires x < p.
  std::uint64_t operator()(std::uint64_t x) const noexcept {
    const auto product = static_cast<unsigned __int128>(a_) * x;
    return static_cast<std::uint64_t>(product % p_) % range_;
  }

  std::uint64_t modulus() const noexcept { return p_; }
  std::uint64_t multiplier() const noexcept { return a_; }
  std::uint64_t range() const noexcept { return range_; }

  friend bool operator==(const UniversalHash&, const UniversalHash&) = default;

 private:
  std::uint64_t p_;
  std::uint64_t a_;
  std::uint64_t range_;
};

/// Exact fraction of multipliers a in [1, p-1] for which h_a(x) == h_a(y).
/// Enumerates every a, so p must be small (it is a test oracle).
double collision_fraction(std::uint64_t p, std::uint64_t range, std::uint64_t x, std::uint64_t y);

}  // namespace slbf
