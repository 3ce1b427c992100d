#include "slbf/params.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "slbf/error.hpp"

namespace slbf {

namespace {

// log2(1/eps) rounded up, ignoring float noise on exact powers of two.
std::uint64_t ceil_log2_inverse(double epsilon) {
  const double bits = std::log2(1.0 / epsilon);
  return static_cast<std::uint64_t>(std::max(1.0, std::ceil(bits - 1e-9)));
}

void check_bound_inputs(std::uint64_t n, Slack m, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidParams("epsilon must lie in (0, 1)");
  if (n == 0) throw InvalidParams("window size n must be positive");
  if (!m.is_infinite() && m.value() == 0) throw InvalidParams("slack m must be positive or infinite");
}

double leading_terms(std::uint64_t n, Slack m, double epsilon) {
  const double nd = static_cast<double>(n);
  const double log_inv = std::log2(1.0 / epsilon);
  double extra = log_inv > 0.0 ? std::log2(log_inv) : 0.0;
  if (!m.is_infinite()) extra = std::max(extra, std::log2(nd / static_cast<double>(m.value())));
  return nd * log_inv + nd * std::max(0.0, extra);
}

}  // namespace

std::uint64_t Slack::value() const {
  if (infinite_) throw std::logic_error("Slack::value() called on infinite slack");
  return value_;
}

std::string Slack::to_string() const { return infinite_ ? "inf" : std::to_string(value_); }

Slack Slack::parse(const std::string& text) {
  std::string lower;
  for (char ch : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  if (lower == "inf" || lower == "infinite" || lower == "infinity") return infinite();
  if (lower.empty() || !std::all_of(lower.begin(), lower.end(), [](unsigned char ch) { return std::isdigit(ch); }))
    throw InvalidParams("slack must be a positive integer or 'inf', got '" + text + "'");
  try {
    return elements(std::stoull(lower));
  } catch (const std::out_of_range&) {
    throw InvalidParams("slack out of range: " + text);
  }
}

FilterParams derive(std::uint64_t n, Slack m, double epsilon, std::uint64_t universe) {
  check_bound_inputs(n, m, epsilon);
  if (universe > kMaxUniverse) throw InvalidParams("universe exceeds the largest 64-bit prime");
  // Relative slack so that e.g. n = 100, epsilon = 0.1, u = 1000 counts as n = epsilon * u.
  const long double eps_u = static_cast<long double>(epsilon) * universe;
  if (static_cast<long double>(n) >= eps_u * (1.0L - 1e-12L))
    throw InvalidParams("requires n < epsilon * u");

  FilterParams p;
  p.n = n;
  p.m = m;
  p.epsilon = epsilon;
  p.universe = universe;

  const std::uint64_t slack_term = m.is_infinite() ? 1 : (n + m.value() - 1) / m.value();
  p.c = std::clamp<std::uint64_t>(std::max(ceil_log2_inverse(epsilon), slack_term), 1, n);
  p.generation_size = (n + p.c - 1) / p.c;
  p.n_prime = n + p.generation_size;

  // Relative tolerance absorbs the representation error of epsilon, as for c.
  const long double exact = static_cast<long double>(p.n_prime) / epsilon;
  const long double range = std::ceil(exact * (1.0L - 1e-12L));
  if (range > static_cast<long double>(kMaxUniverse))
    throw InvalidParams("fingerprint range n'/epsilon does not fit in 64 bits");
  p.fp_range = static_cast<std::uint64_t>(range);

  p.gen_modulus = 2 * p.c + 3;
  p.tag_bits = static_cast<unsigned>(std::bit_width(p.gen_modulus - 1));
  return p;
}

double upper_bound_bits(std::uint64_t n, Slack m, double epsilon) {
  check_bound_inputs(n, m, epsilon);
  return leading_terms(n, m, epsilon);
}

double lower_bound_bits(std::uint64_t n, Slack m, double epsilon) {
  check_bound_inputs(n, m, epsilon);
  return leading_terms(n, m, epsilon);
}

}  // namespace slbf
