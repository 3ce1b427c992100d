#include "slbf/oracle.hpp"

#include <limits>
#include <stdexcept>

#include "slbf/error.hpp"

namespace slbf {

const char* to_string(WindowClass c) noexcept {
  switch (c) {
    case WindowClass::kInWindow:
      return "in-window";
    case WindowClass::kInSlack:
      return "in-slack";
    case WindowClass::kOut:
      return "out";
  }
  return "?";
}

WindowOracle::WindowOracle(std::uint64_t n, Slack m)
    : n_(n), m_(m), horizon_(m.is_infinite() ? std::numeric_limits<std::uint64_t>::max() : n + m.value()) {
  if (n == 0) throw InvalidParams("window size n must be positive");
}

void WindowOracle::push(std::uint64_t x) {
  last_seen_[x] = time_;
  ++time_;
  if (m_.is_infinite()) {
    // Only the last n positions are needed for at_age(); membership lives in last_seen_.
    buffer_.push_back(x);
    if (buffer_.size() > n_) buffer_.pop_front();
    return;
  }
  buffer_.push_back(x);
  if (buffer_.size() > horizon_) {
    const std::uint64_t expired = buffer_.front();
    buffer_.pop_front();
    const std::uint64_t expired_time = time_ - 1 - horizon_;
    if (auto it = last_seen_.find(expired); it != last_seen_.end() && it->second == expired_time) last_seen_.erase(it);
  }
}

WindowClass WindowOracle::classify(std::uint64_t x) const {
  const auto it = last_seen_.find(x);
  if (it == last_seen_.end()) return WindowClass::kOut;
  const std::uint64_t age = time_ - 1 - it->second;
  if (age < n_) return WindowClass::kInWindow;
  if (age < horizon_) return WindowClass::kInSlack;
  return WindowClass::kOut;
}

std::uint64_t WindowOracle::at_age(std::uint64_t age) const {
  if (age >= buffer_.size()) throw std::out_of_range("age beyond retained history");
  return buffer_[buffer_.size() - 1 - age];
}

}  // namespace slbf
