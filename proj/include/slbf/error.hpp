#pragma once

#include <stdexcept>
#include <string>

namespace slbf {

/// Raised when (n, m, epsilon, u) or a derived quantity violates a precondition.
class InvalidParams : public std::invalid_argument {
 public:
  explicit InvalidParams(const std::string& what) : std::invalid_argument(what) {}
};

/// The cuckoo walk ran out of kicks. The dictionary is left as it was before
/// the call, except that stale cells touched by the walk have been reclaimed.
class InsertOverflow : public std::runtime_error {
 public:
  explicit InsertOverflow(const std::string& what) : std::runtime_error(what) {}
};

/// A snapshot could not be decoded (bad magic, version, truncation, or
/// inconsistent derived fields).
class SnapshotError : public std::runtime_error {
 public:
  explicit SnapshotError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace slbf
