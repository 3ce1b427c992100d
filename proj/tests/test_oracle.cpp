#include <random>
#include <vector>

#include "doctest.h"
#include "slbf/oracle.hpp"

using namespace slbf;

namespace {

WindowClass naive(const std::vector<std::uint64_t>& stream, std::uint64_t n, Slack m, std::uint64_t x) {
  for (std::uint64_t age = 0; age < stream.size(); ++age) {
    if (stream[stream.size() - 1 - age] != x) continue;
    if (age < n) return WindowClass::kInWindow;
    if (m.is_infinite() || age < n + m.value()) return WindowClass::kInSlack;
    return WindowClass::kOut;
  }
  return WindowClass::kOut;
}

}  // namespace

TEST_CASE("window and slack boundaries") {
  WindowOracle o(3, Slack::elements(2));
  for (std::uint64_t x : {1, 2, 3, 4, 5, 6}) o.push(x);
  CHECK(o.classify(6) == WindowClass::kInWindow);
  CHECK(o.classify(4) == WindowClass::kInWindow);
  CHECK(o.classify(3) == WindowClass::kInSlack);
  CHECK(o.classify(2) == WindowClass::kInSlack);
  CHECK(o.classify(1) == WindowClass::kOut);
  CHECK(o.classify(99) == WindowClass::kOut);
  CHECK(o.at_age(0) == 6);
  CHECK(o.at_age(4) == 2);
  CHECK(o.time() == 6);
  CHECK(o.retained() == 5);
}

TEST_CASE("re-insertion refreshes the position") {
  WindowOracle o(2, Slack::elements(0));
  o.push(7);
  o.push(8);
  o.push(7);
  o.push(9);
  CHECK(o.classify(7) == WindowClass::kInWindow);
  CHECK(o.classify(8) == WindowClass::kOut);
}

TEST_CASE("infinite slack remembers everything") {
  WindowOracle o(2, Slack::infinite());
  for (std::uint64_t x = 0; x < 100; ++x) o.push(x);
  CHECK(o.classify(0) == WindowClass::kInSlack);
  CHECK(o.classify(99) == WindowClass::kInWindow);
  CHECK(o.classify(100) == WindowClass::kOut);
}

TEST_CASE("differential against a list scan") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    const std::uint64_t n = 1 + rng() % 10;
    const Slack m = seed % 4 == 0 ? Slack::infinite() : Slack::elements(rng() % 8);
    WindowOracle o(n, m);
    std::vector<std::uint64_t> stream;
    for (int step = 0; step < 300; ++step) {
      const std::uint64_t x = rng() % 25;
      o.push(x);
      stream.push_back(x);
      for (std::uint64_t q = 0; q < 25; ++q) CHECK(o.classify(q) == naive(stream, n, m, q));
    }
  }
}
