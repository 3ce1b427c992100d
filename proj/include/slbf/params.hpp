#pragma once

#include <cstdint>
#include <string>

namespace slbf {

/// Largest prime below 2^64. Universes are capped here so the hash modulus
/// p >= u always fits in a machine word.
inline constexpr std::uint64_t kMaxUniverse = 18446744073709551557ULL;

/// Slackness m: either a finite number of elements or unbounded.
class Slack {
 public:
  static constexpr Slack infinite() noexcept { return Slack(true, 0); }
  static constexpr Slack elements(std::uint64_t m) noexcept { return Slack(false, m); }

  constexpr bool is_infinite() const noexcept { return infinite_; }
  /// Finite slack value. Calling this on an infinite slack is a logic error.
  std::uint64_t value() const;

  /// "inf" or the decimal value.
  std::string to_string() const;
  /// Accepts "inf", "infinite", "infinity" (any case) or a decimal integer.
  static Slack parse(const std::string& text);

  friend constexpr bool operator==(Slack a, Slack b) noexcept {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }

 private:
  constexpr Slack(bool infinite, std::uint64_t value) noexcept : infinite_(infinite), value_(value) {}

  bool infinite_;
  std::uint64_t value_;
};

/// Every structural quantity of a sliding filter, derived once from (n, m, epsilon, u).
struct FilterParams {
  std::uint64_t n = 0;              ///< window size
  Slack m = Slack::infinite();      ///< slackness
  double epsilon = 0.0;             ///< false-positive bound
  std::uint64_t universe = 0;       ///< elements live in [0, universe)
  std::uint64_t c = 0;              ///< generations per window
  std::uint64_t generation_size = 0;  ///< g = ceil(n / c)
  std::uint64_t n_prime = 0;        ///< n + g
  std::uint64_t fp_range = 0;       ///< R = ceil(n_prime / epsilon)
  std::uint64_t gen_modulus = 0;    ///< G = 2c + 3
  unsigned tag_bits = 0;            ///< ceil(log2 G)

  /// Upper bound on simultaneously active fingerprints: c full generations
  /// plus the one being filled. Equals n_prime whenever c divides n.
  std::uint64_t active_capacity() const noexcept { return (c + 1) * generation_size; }

  friend bool operator==(const FilterParams&, const FilterParams&) = default;
};

/// Derives all parameters. Throws InvalidParams when epsilon is outside (0, 1),
/// n or m is zero, n >= epsilon * u, u exceeds kMaxUniverse, or the
/// fingerprint range would not fit below kMaxUniverse.
FilterParams derive(std::uint64_t n, Slack m, double epsilon, std::uint64_t universe = kMaxUniverse);

/// Leading terms of the construction's space:
/// n log(1/eps) + n max(log(n/m), log log(1/eps)), max-term floored at 0.
double upper_bound_bits(std::uint64_t n, Slack m, double epsilon);

/// Leading terms of the space lower bound, without the -O(n) slack. For
/// m = infinite the log(n/m) branch drops out.
double lower_bound_bits(std::uint64_t n, Slack m, double epsilon);

}  // namespace slbf
