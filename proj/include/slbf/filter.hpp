#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "slbf/dictionary.hpp"
#include "slbf/hashing.hpp"
#include "slbf/params.hpp"

namespace slbf {

/// How stale generations are removed.
enum class Mode : std::uint8_t {
  /// Labels mod c+2; a full scan deletes the expired generation whenever the
  /// label advances. Kept as a simple reference for differential testing.
  kAmortized = 0,
  /// Labels mod 2c+3; a fixed number of cells (normally two) is scanned per
  /// insert and stale cells are reclaimed lazily.
  kDeamortized = 1,
};

const char* to_string(Mode mode) noexcept;

struct SpaceReport {
  DictionarySpace dictionary;
  std::uint64_t counter_bits = 0;  // position within generation + generation label
  std::uint64_t hash_bits = 0;     // p and a

  std::uint64_t total_bits() const noexcept { return dictionary.total_bits() + counter_bits + hash_bits; }
};

struct OpCost {
  std::uint64_t count = 0;
  std::uint64_t total_cells = 0;
  std::uint64_t max_cells = 0;

  double mean_cells() const noexcept { return count ? static_cast<double>(total_cells) / count : 0.0; }
};

/// Touched-cell counts from the instrumentation counters.
struct CostReport {
  OpCost query;
  OpCost insert;  // dictionary write only, scan excluded
  OpCost scan;    // per-insert scan work (deamortized) or full scans (amortized)
  std::uint64_t max_kicks = 0;
  std::uint64_t kicked_inserts = 0;
  std::uint64_t max_insert_cells_without_kicks = 0;
};

/// Approximate membership over the last n elements of a stream, with slack m
/// and false-positive probability epsilon for anything older than n + m.
///
/// Every element carries the label of the generation in which it was last
/// seen; a generation spans g = ceil(n/c) inserts. A tag t is active while
/// (label - t) mod G <= c, i.e. for the current and the c previous
/// generations, which together always cover the last n inserts.
///
/// Single writer. `query` does not mutate the table and may run concurrently
/// with other queries.
class SlidingFilter {
 public:
  SlidingFilter(const FilterParams& params, std::uint64_t seed, Mode mode = Mode::kDeamortized);

  /// Requires x < params().universe. Propagates InsertOverflow; the element is
  /// then not recorded but counters and scan progress stay consistent.
  void insert(std::uint64_t x);

  /// True when x may be among the last n elements; always true when it is.
  bool query(std::uint64_t x) const;

  const FilterParams& params() const noexcept { return params_; }
  Mode mode() const noexcept { return mode_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const UniversalHash& hash() const noexcept { return hash_; }
  const Dictionary& dictionary() const noexcept { return dict_; }

  std::uint64_t position() const noexcept { return position_; }
  std::uint32_t label() const noexcept { return label_; }
  std::uint64_t label_modulus() const noexcept { return modulus_; }
  /// Cells scanned per insert in deamortized mode; 0 in amortized mode.
  std::uint64_t scan_width() const noexcept { return scan_width_; }

  bool is_active(std::uint32_t tag) const noexcept {
    return (label_ + modulus_ - tag) % modulus_ <= params_.c;
  }

  /// Occupied cells carrying an active tag. Full sweep.
  std::uint64_t active_elements() const;

  SpaceReport bits_used() const;
  CostReport step_cost_stats() const;
  void reset_cost_stats() noexcept;

  /// When enabled, every label advance sweeps the table and counts occupied
  /// cells that still carry the incoming label.
  void set_label_checks(bool enabled) noexcept { label_checks_ = enabled; }
  std::uint64_t label_violations() const noexcept { return label_violations_; }

  /// Versioned little-endian snapshot; see README for the byte layout.
  std::vector<std::uint8_t> snapshot() const;
  static SlidingFilter restore(std::span<const std::uint8_t> bytes);
  void save(std::ostream& out) const;
  static SlidingFilter load(std::istream& in);

  SlidingFilter(const SlidingFilter& other);
  SlidingFilter& operator=(const SlidingFilter& other);
  SlidingFilter(SlidingFilter&&) noexcept;
  SlidingFilter& operator=(SlidingFilter&&) noexcept;
  ~SlidingFilter();

 private:
  struct QueryCost {
    std::atomic<std::uint64_t> count{0};
    std::atomic<std::uint64_t> total{0};
    std::atomic<std::uint64_t> max{0};
  };

  void advance_label();
  void record(OpCost& cost, std::uint64_t cells) noexcept;

  FilterParams params_;
  Mode mode_;
  std::uint64_t seed_;
  UniversalHash hash_;
  std::uint64_t modulus_;
  Dictionary dict_;
  std::uint64_t scan_width_;
  std::uint64_t position_ = 0;
  std::uint32_t label_ = 0;

  bool label_checks_ = false;
  std::uint64_t label_violations_ = 0;

  OpCost insert_cost_;
  OpCost scan_cost_;
  std::uint64_t max_kicks_ = 0;
  std::uint64_t kicked_inserts_ = 0;
  std::uint64_t max_plain_insert_ = 0;
  mutable QueryCost query_cost_;
};

}  // namespace slbf
