#include "slbf/hashing.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <string>

#include "slbf/error.hpp"
#include "slbf/params.hpp"

namespace slbf {

namespace {

using u128 = unsigned __int128;

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t mod) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % mod);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
  std::uint64_t result = 1;
  base %= mod;
  while (exp > 0) {
    if (exp & 1) result = mul_mod(result, base, mod);
    base = mul_mod(base, base, mod);
    exp >>= 1;
  }
  return result;
}

}  // namespace

bool is_prime(std::uint64_t value) {
  if (value < 2) return false;
  // The first twelve primes as witnesses decide every n < 3.3e24.
  constexpr std::array<std::uint64_t, 12> kWitnesses = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (std::uint64_t w : kWitnesses) {
    if (value % w == 0) return value == w;
  }
  std::uint64_t d = value - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  for (std::uint64_t w : kWitnesses) {
    std::uint64_t x = pow_mod(w, d, value);
    if (x == 1 || x == value - 1) continue;
    bool composite = true;
    for (int i = 1; i < r; ++i) {
      x = mul_mod(x, x, value);
      if (x == value - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::uint64_t next_prime(std::uint64_t value) {
  if (value > kMaxUniverse) throw InvalidParams("no 64-bit prime >= " + std::to_string(value));
  if (value <= 2) return 2;
  std::uint64_t candidate = value | 1;
  while (!is_prime(candidate)) candidate += 2;
  return candidate;
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  // Reject the top partial block so every residue is equally likely.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return draw % bound;
}

UniversalHash::UniversalHash(std::uint64_t p, std::uint64_t a, std::uint64_t range) : p_(p), a_(a), range_(range) {
  if (!is_prime(p)) throw InvalidParams("hash modulus must be prime");
  if (a == 0 || a >= p) throw InvalidParams("hash multiplier must lie in [1, p-1]");
  if (range == 0 || range > p) throw InvalidParams("hash range must lie in [1, p]");
}

UniversalHash UniversalHash::create(std::uint64_t universe, std::uint64_t range, std::uint64_t seed) {
  if (universe < 2) throw InvalidParams("universe must contain at least two elements");
  if (range == 0) throw InvalidParams("hash range must be positive");
  const std::uint64_t p = next_prime(std::max(universe, range));
  std::mt19937_64 rng(seed);
  const std::uint64_t a = 1 + uniform_below(rng, p - 1);
  return UniversalHash(p, a, range);
}

double collision_fraction(std::uint64_t p, std::uint64_t range, std::uint64_t x, std::uint64_t y) {
  if (x == y || x >= p || y >= p) throw InvalidParams("collision_fraction needs distinct x, y in [0, p)");
  (void)UniversalHash(p, 1, range);  // validates p and range
  std::uint64_t collisions = 0;
  for (std::uint64_t a = 1; a < p; ++a) {
    if (mul_mod(a, x, p) % range == mul_mod(a, y, p) % range) ++collisions;
  }
  return static_cast<double>(collisions) / static_cast<double>(p - 1);
}

}  // namespace slbf
