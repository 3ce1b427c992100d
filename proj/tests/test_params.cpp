#include <cmath>
#include <vector>

#include "doctest.h"
#include "slbf/error.hpp"
#include "slbf/params.hpp"

using namespace slbf;

TEST_CASE("derive: decimal epsilon does not round R up") {
  CHECK(derive(1, Slack::elements(1), 2.0 / 1009, 1009).fp_range == 1009);
  const FilterParams p = derive(100, Slack::elements(100), 0.1);
  CHECK(p.n_prime == 125);
  CHECK(p.fp_range == 1250);
}

TEST_CASE("derive: balanced window and slack") {
  const FilterParams p = derive(1000, Slack::elements(1000), std::ldexp(1.0, -10), kMaxUniverse);
  CHECK(p.c == 10);
  CHECK(p.generation_size == 100);
  CHECK(p.n_prime == 1100);
  CHECK(p.fp_range == 1126400);
  CHECK(p.gen_modulus == 23);
  CHECK(p.tag_bits == 5);
}

TEST_CASE("derive: small slack forces many generations") {
  const FilterParams p = derive(1000, Slack::elements(10), 1.0 / 16, kMaxUniverse);
  CHECK(p.c == 100);
  CHECK(p.generation_size == 10);
  CHECK(p.n_prime == 1010);
  CHECK(p.fp_range == 16160);
  CHECK(p.gen_modulus == 203);
  CHECK(p.tag_bits == 8);
}

TEST_CASE("derive: c = 1 boundary") {
  const FilterParams p = derive(1000, Slack::infinite(), 0.5, kMaxUniverse);
  CHECK(p.c == 1);
  CHECK(p.generation_size == 1000);
  CHECK(p.n_prime == 2000);
  CHECK(p.gen_modulus == 5);
  CHECK(p.tag_bits == 3);
}

TEST_CASE("derive: c is clamped to n") {
  const FilterParams p = derive(5, Slack::elements(1), std::ldexp(1.0, -20), kMaxUniverse);
  CHECK(p.c == 5);
  CHECK(p.generation_size == 1);
}

TEST_CASE("derive: preconditions") {
  CHECK_THROWS_AS(derive(10, Slack::infinite(), 0.0, 1000), InvalidParams);
  CHECK_THROWS_AS(derive(10, Slack::infinite(), 1.0, 1000), InvalidParams);
  CHECK_THROWS_AS(derive(10, Slack::infinite(), std::nan(""), 1000), InvalidParams);
  CHECK_THROWS_AS(derive(0, Slack::infinite(), 0.1, 1000), InvalidParams);
  CHECK_THROWS_AS(derive(10, Slack::elements(0), 0.1, 1000), InvalidParams);
  CHECK_THROWS_AS(derive(100, Slack::infinite(), 0.1, 1000), InvalidParams);  // n == eps * u
  CHECK_NOTHROW(derive(99, Slack::infinite(), 0.1, 1000));
}

TEST_CASE("derive: invariants over a grid") {
  for (std::uint64_t n : {1, 2, 3, 7, 50, 100, 999, 1000, 4096, 10000}) {
    for (double eps : {0.5, 0.3, 0.1, 1.0 / 16, 0.01, std::ldexp(1.0, -10), 1e-6}) {
      for (Slack m : {Slack::elements(1), Slack::elements(3), Slack::elements(n / 2 + 1), Slack::elements(n),
                      Slack::elements(5 * n), Slack::infinite()}) {
        const FilterParams p = derive(n, m, eps);
        CAPTURE(n);
        CAPTURE(eps);
        CAPTURE(m.to_string());
        CHECK(p.c >= 1);
        CHECK(p.c <= n);
        CHECK(p.generation_size * p.c >= n);
        CHECK(p.n_prime == n + p.generation_size);
        if (!m.is_infinite()) CHECK(p.generation_size <= m.value());
        const long double ratio = static_cast<long double>(p.n_prime) / eps;
        CHECK(static_cast<long double>(p.fp_range) >= ratio * (1.0L - 1e-12L));
        CHECK(static_cast<long double>(p.fp_range) < ratio + 1.0L);
        CHECK(p.gen_modulus == 2 * p.c + 3);
        CHECK((std::uint64_t{1} << p.tag_bits) >= p.gen_modulus);
        CHECK(p == derive(n, m, eps));
      }
    }
  }
}

TEST_CASE("Slack parsing") {
  CHECK(Slack::parse("inf").is_infinite());
  CHECK(Slack::parse("Infinity").is_infinite());
  CHECK(Slack::parse("42") == Slack::elements(42));
  CHECK_THROWS_AS(Slack::parse("-3"), InvalidParams);
  CHECK_THROWS_AS(Slack::parse(""), InvalidParams);
  CHECK_THROWS_AS(Slack::infinite().value(), std::logic_error);
  CHECK(Slack::elements(7).to_string() == "7");
}

TEST_CASE("upper bound leading terms") {
  CHECK(upper_bound_bits(1024, Slack::infinite(), 1.0 / 256) == doctest::Approx(11264));
  CHECK(upper_bound_bits(1024, Slack::elements(1), 0.5) == doctest::Approx(11264));
  CHECK(upper_bound_bits(100, Slack::elements(100), std::ldexp(1.0, -16)) == doctest::Approx(2000));
  CHECK_THROWS_AS(upper_bound_bits(100, Slack::elements(100), 1.5), InvalidParams);
}

TEST_CASE("lower bound leading terms") {
  CHECK(lower_bound_bits(1024, Slack::infinite(), 1.0 / 256) == doctest::Approx(11264));
  CHECK(lower_bound_bits(1024, Slack::elements(1024), 1.0 / 256) == doctest::Approx(11264));
  CHECK(lower_bound_bits(2048, Slack::elements(2), 1.0 / 16) == doctest::Approx(28672));
  CHECK_THROWS_AS(lower_bound_bits(0, Slack::infinite(), 0.1), InvalidParams);
}

TEST_CASE("bound properties over a grid") {
  const std::vector<double> eps_grid = {0.5, 0.25, 0.1, 1.0 / 64, 1e-3, 1e-6};
  const std::vector<std::uint64_t> n_grid = {16, 100, 1024, 65536};
  for (std::uint64_t n : n_grid) {
    for (std::size_t e = 0; e < eps_grid.size(); ++e) {
      const double eps = eps_grid[e];
      double previous_m = lower_bound_bits(n, Slack::elements(1), eps);
      for (std::uint64_t m = 2; m <= 4 * n; m *= 2) {
        const double lower = lower_bound_bits(n, Slack::elements(m), eps);
        CHECK(upper_bound_bits(n, Slack::elements(m), eps) >= lower);
        CHECK(lower <= previous_m + 1e-9);  // non-increasing in m
        previous_m = lower;
        if (e + 1 < eps_grid.size()) {
          CHECK(lower_bound_bits(n, Slack::elements(m), eps_grid[e + 1]) >= lower);  // non-increasing in eps
        }
        CHECK(lower_bound_bits(2 * n, Slack::elements(m), eps) >= lower);  // non-decreasing in n
        const double log_inv = std::log2(1.0 / eps);
        if (static_cast<double>(m) >= static_cast<double>(n) / log_inv) {
          CHECK(lower == doctest::Approx(lower_bound_bits(n, Slack::infinite(), eps)));
        }
      }
    }
  }
}
