#pragma once

#include <cstdint>
#include <deque>
#include <unordered_map>

#include "slbf/params.hpp"

namespace slbf {

enum class WindowClass { kInWindow, kInSlack, kOut };

const char* to_string(WindowClass c) noexcept;

/// Exact reference for the last n and last n + m stream elements. Keeps the
/// most recent position of every element seen within n + m steps (all
/// history when m is infinite).
class WindowOracle {
 public:
  WindowOracle(std::uint64_t n, Slack m);

  void push(std::uint64_t x);
  WindowClass classify(std::uint64_t x) const;

  /// Stream length so far.
  std::uint64_t time() const noexcept { return time_; }
  /// Element at age `age` (0 = newest); age must be < retained().
  std::uint64_t at_age(std::uint64_t age) const;
  /// Number of stream positions currently retained (<= n + m).
  std::uint64_t retained() const noexcept { return buffer_.size(); }
  /// Distinct elements currently tracked.
  std::uint64_t tracked() const noexcept { return last_seen_.size(); }

 private:
  std::uint64_t n_;
  Slack m_;
  std::uint64_t horizon_;  // n + m, or unbounded
  std::uint64_t time_ = 0;
  std::deque<std::uint64_t> buffer_;
  std::unordered_map<std::uint64_t, std::uint64_t> last_seen_;
};

}  // namespace slbf
