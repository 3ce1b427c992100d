#pragma once

#include <array>
#include <concepts>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slbf/error.hpp"
#include "slbf/hashing.hpp"
#include "slbf/packed_array.hpp"
#include "slbf/permutation.hpp"

namespace slbf {

/// Tag predicate deciding whether an occupied cell is logically deleted.
template <class F>
concept StalePredicate = std::predicate<const F&, std::uint32_t>;

struct NeverStale {
  constexpr bool operator()(std::uint32_t) const noexcept { return false; }
};

/// Decoded contents of one cell.
struct DictCell {
  bool occupied = false;
  std::uint64_t fingerprint = 0;
  std::uint32_t tag = 0;
};

/// Itemized bit accounting for a dictionary. The cell array dominates; the
/// rest is the fixed per-structure state.
struct DictionarySpace {
  std::uint64_t cells = 0;
  unsigned occupied_bits = 1;
  unsigned choice_bits = 1;
  unsigned remainder_bits = 0;
  unsigned tag_bits = 0;
  std::uint64_t cell_array_bits = 0;
  std::uint64_t cursor_bits = 0;
  std::uint64_t occupancy_bits = 0;
  std::uint64_t seed_bits = 0;
  std::uint64_t walk_state_bits = 0;

  unsigned cell_bits() const noexcept { return occupied_bits + choice_bits + remainder_bits + tag_bits; }
  std::uint64_t overhead_bits() const noexcept { return cursor_bits + occupancy_bits + seed_bits + walk_state_bits; }
  std::uint64_t total_bits() const noexcept { return cell_array_bits + overhead_bits(); }
};

/// Raw mutable state, exposed for snapshots.
struct DictionaryState {
  std::uint64_t cursor = 0;
  std::uint64_t walk_counter = 0;
  std::vector<std::uint64_t> remainder_words;
  std::vector<std::uint64_t> meta_words;
};

/// Fingerprint dictionary with small associated tags, built as a bucketized
/// two-choice cuckoo table (4 cells per bucket, random-walk eviction).
///
/// Fingerprints are quotiented: choice j sends fp through a keyed permutation
/// pi_j of [0, R); the low part pi_j(fp) mod buckets picks the bucket and only
/// the high part, the remainder, is stored together with j. A cell's
/// fingerprint is recovered as pi_j^-1(remainder * buckets + bucket).
///
/// Cells are scanned in index order by a persistent cursor. Any operation that
/// examines a cell whose tag satisfies the caller's stale predicate frees it,
/// except `member`, which never writes.
class Dictionary {
 public:
  static constexpr std::uint64_t kBucketSize = 4;
  static constexpr std::uint64_t kMaxKicks = 500;
  static constexpr double kLoadTarget = 0.9;

  /// element_capacity / kLoadTarget plus 6 sqrt(element_capacity) cells of headroom,
  /// rounded up to a multiple of 2 * kBucketSize.
  static std::uint64_t cells_for(std::uint64_t element_capacity);

  Dictionary(std::uint64_t element_capacity, std::uint64_t fp_range, unsigned tag_bits, std::uint64_t seed);

  /// Tag stored with fp, or nothing when fp is absent or its tag is stale.
  /// Adds the number of cells examined to *touched when given.
  template <StalePredicate Stale = NeverStale>
  std::optional<std::uint32_t> member(std::uint64_t fp, const Stale& stale = {},
                                      std::uint64_t* touched = nullptr) const;

  /// Sets fp's tag, inserting fp if absent. Throws InsertOverflow when the
  /// cuckoo walk exceeds kMaxKicks; the table is then rolled back.
  template <StalePredicate Stale = NeverStale>
  void insert_or_update(std::uint64_t fp, std::uint32_t tag, const Stale& stale = {});

  /// Removes fp; returns whether it was present.
  bool erase(std::uint64_t fp);

  /// Visits the next k cells in scan order, freeing stale ones. Returns the
  /// number freed.
  template <StalePredicate Stale>
  std::uint64_t scan_step(std::uint64_t k, const Stale& stale);

  DictCell cell(std::uint64_t index) const;

  std::uint64_t occupancy() const noexcept { return occupancy_; }
  std::uint64_t capacity_cells() const noexcept { return cells_; }
  std::uint64_t bucket_count() const noexcept { return buckets_; }
  std::uint64_t element_capacity() const noexcept { return element_capacity_; }
  std::uint64_t fp_range() const noexcept { return fp_range_; }
  unsigned tag_bits() const noexcept { return tag_bits_; }
  std::uint64_t cursor() const noexcept { return cursor_; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// Cells examined by the most recent insert_or_update / erase / scan_step.
  std::uint64_t last_touched() const noexcept { return last_touched_; }
  /// Evictions performed by the most recent insert_or_update.
  std::uint64_t last_kicks() const noexcept { return last_kicks_; }

  DictionarySpace bits_used() const;

  DictionaryState state() const;
  /// Restores a state captured from a dictionary with identical construction
  /// arguments. Throws SnapshotError on layout mismatch.
  void restore(const DictionaryState& state);

  /// Full-sweep check that no two occupied cells share a fingerprint and that
  /// every occupied cell sits in one of its candidate buckets. Test aid.
  bool check_invariants() const;

 private:
  struct Placement {
    std::uint64_t bucket;
    std::uint64_t remainder;
  };

  static constexpr std::uint64_t kOccupied = 1;
  static constexpr std::uint64_t kChoiceShift = 1;
  static constexpr std::uint64_t kTagShift = 2;

  Placement place(unsigned choice, std::uint64_t fp) const noexcept {
    const std::uint64_t y = perms_[choice].forward(fp);
    return {y % buckets_, y / buckets_};
  }
  std::uint64_t recover(unsigned choice, std::uint64_t bucket, std::uint64_t remainder) const noexcept {
    return perms_[choice].inverse(remainder * buckets_ + bucket);
  }
  static std::uint64_t encode_meta(unsigned choice, std::uint32_t tag) noexcept {
    return kOccupied | (std::uint64_t{choice} << kChoiceShift) | (std::uint64_t{tag} << kTagShift);
  }
  static bool meta_occupied(std::uint64_t meta) noexcept { return meta & kOccupied; }
  static unsigned meta_choice(std::uint64_t meta) noexcept { return (meta >> kChoiceShift) & 1; }
  static std::uint32_t meta_tag(std::uint64_t meta) noexcept { return static_cast<std::uint32_t>(meta >> kTagShift); }

  void clear_cell(std::uint64_t index) noexcept {
    meta_.set(index, 0);
    remainders_.set(index, 0);
    --occupancy_;
  }
  void write_cell(std::uint64_t index, unsigned choice, std::uint64_t remainder, std::uint32_t tag) noexcept {
    remainders_.set(index, remainder);
    meta_.set(index, encode_meta(choice, tag));
  }

  std::uint64_t next_random() noexcept { return mix64(seed_ + 0x9E3779B97F4A7C15ULL * walk_counter_++); }

  std::uint64_t element_capacity_;
  std::uint64_t fp_range_;
  unsigned tag_bits_;
  std::uint64_t seed_;
  std::uint64_t cells_;
  std::uint64_t buckets_;
  std::array<KeyedPermutation, 2> perms_;
  PackedArray remainders_;
  PackedArray meta_;
  std::uint64_t occupancy_ = 0;
  std::uint64_t cursor_ = 0;
  std::uint64_t walk_counter_ = 0;
  std::uint64_t last_touched_ = 0;
  std::uint64_t last_kicks_ = 0;

  struct KickRecord {
    std::uint64_t index;
    std::uint64_t remainder;
    std::uint64_t meta;
  };
  std::vector<KickRecord> kick_log_;
};

template <StalePredicate Stale>
std::optional<std::uint32_t> Dictionary::member(std::uint64_t fp, const Stale& stale, std::uint64_t* touched) const {
  if (fp >= fp_range_) return std::nullopt;
  const std::array<Placement, 2> at = {place(0, fp), place(1, fp)};
  const unsigned distinct = at[0].bucket == at[1].bucket ? 1 : 2;
  std::uint64_t examined = 0;
  std::optional<std::uint32_t> found;
  for (unsigned b = 0; b < distinct; ++b) {
    for (std::uint64_t slot = 0; slot < kBucketSize; ++slot) {
      const std::uint64_t index = at[b].bucket * kBucketSize + slot;
      ++examined;
      const std::uint64_t meta = meta_.get(index);
      if (!meta_occupied(meta)) continue;
      const Placement& mine = at[meta_choice(meta)];
      if (mine.bucket != at[b].bucket || remainders_.get(index) != mine.remainder) continue;
      // Each fingerprint occupies exactly one cell, so a stale hit ends the search too.
      if (!stale(meta_tag(meta))) found = meta_tag(meta);
      if (touched) *touched += examined;
      return found;
    }
  }
  if (touched) *touched += examined;
  return found;
}

template <StalePredicate Stale>
void Dictionary::insert_or_update(std::uint64_t fp, std::uint32_t tag, const Stale& stale) {
  if (fp >= fp_range_) throw std::out_of_range("fingerprint outside [0, R)");
  const std::array<Placement, 2> at = {place(0, fp), place(1, fp)};
  const unsigned distinct = at[0].bucket == at[1].bucket ? 1 : 2;

  std::uint64_t touched = 0;
  std::optional<std::uint64_t> match;
  std::optional<std::uint64_t> free_cell;
  unsigned free_choice = 0;
  for (unsigned b = 0; b < distinct; ++b) {
    for (std::uint64_t slot = 0; slot < kBucketSize; ++slot) {
      const std::uint64_t index = at[b].bucket * kBucketSize + slot;
      ++touched;
      const std::uint64_t meta = meta_.get(index);
      if (meta_occupied(meta)) {
        const Placement& mine = at[meta_choice(meta)];
        if (mine.bucket == at[b].bucket && remainders_.get(index) == mine.remainder) {
          match = index;
          continue;
        }
        if (!stale(meta_tag(meta))) continue;
        clear_cell(index);
      }
      if (!free_cell) {
        free_cell = index;
        free_choice = b;
      }
    }
  }

  last_kicks_ = 0;
  if (match) {
    meta_.set(*match, encode_meta(meta_choice(meta_.get(*match)), tag));
    last_touched_ = touched;
    return;
  }
  if (free_cell) {
    // With a shared bucket either choice is valid; keep choice 0 for determinism.
    write_cell(*free_cell, free_choice, at[free_choice].remainder, tag);
    ++occupancy_;
    last_touched_ = touched;
    return;
  }

  // Random-walk eviction. The homeless entry is (choice, remainder, tag) bound
  // for `bucket`.
  kick_log_.clear();
  unsigned choice = static_cast<unsigned>(next_random() & 1);
  std::uint64_t bucket = at[choice].bucket;
  std::uint64_t remainder = at[choice].remainder;
  std::uint32_t carried_tag = tag;
  while (last_kicks_ < kMaxKicks) {
    const std::uint64_t index = bucket * kBucketSize + next_random() % kBucketSize;
    const std::uint64_t victim_meta = meta_.get(index);
    const std::uint64_t victim_remainder = remainders_.get(index);
    kick_log_.push_back({index, victim_remainder, victim_meta});
    write_cell(index, choice, remainder, carried_tag);
    ++last_kicks_;

    const unsigned victim_choice = meta_choice(victim_meta);
    const std::uint64_t victim_fp = recover(victim_choice, bucket, victim_remainder);
    choice = 1 - victim_choice;
    const Placement next = place(choice, victim_fp);
    bucket = next.bucket;
    remainder = next.remainder;
    carried_tag = meta_tag(victim_meta);

    std::optional<std::uint64_t> slot_free;
    for (std::uint64_t slot = 0; slot < kBucketSize; ++slot) {
      const std::uint64_t candidate = bucket * kBucketSize + slot;
      ++touched;
      const std::uint64_t meta = meta_.get(candidate);
      if (meta_occupied(meta)) {
        if (!stale(meta_tag(meta))) continue;
        clear_cell(candidate);
      }
      if (!slot_free) slot_free = candidate;
    }
    if (slot_free) {
      write_cell(*slot_free, choice, remainder, carried_tag);
      ++occupancy_;
      last_touched_ = touched;
      return;
    }
  }

  for (auto it = kick_log_.rbegin(); it != kick_log_.rend(); ++it) {
    remainders_.set(it->index, it->remainder);
    meta_.set(it->index, it->meta);
  }
  last_touched_ = touched;
  throw InsertOverflow("cuckoo walk exceeded " + std::to_string(kMaxKicks) + " kicks at occupancy " +
                       std::to_string(occupancy_) + "/" + std::to_string(cells_));
}

template <StalePredicate Stale>
std::uint64_t Dictionary::scan_step(std::uint64_t k, const Stale& stale) {
  std::uint64_t freed = 0;
  for (std::uint64_t step = 0; step < k; ++step) {
    const std::uint64_t meta = meta_.get(cursor_);
    if (meta_occupied(meta) && stale(meta_tag(meta))) {
      clear_cell(cursor_);
      ++freed;
    }
    if (++cursor_ == cells_) cursor_ = 0;
  }
  last_touched_ = k;
  last_kicks_ = 0;
  return freed;
}

}  // namespace slbf
