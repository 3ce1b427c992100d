#include "slbf/dictionary.hpp"

#include <bit>
#include <cmath>
#include <unordered_set>

namespace slbf {

namespace {
constexpr std::uint64_t kPermDomain[2] = {0x243F6A8885A308D3ULL, 0x13198A2E03707344ULL};
}  // namespace

std::uint64_t Dictionary::cells_for(std::uint64_t element_capacity) {
  // ceil(capacity / 0.9) plus ceil(6 sqrt(capacity)) cells of headroom, then up
  // to a whole number of bucket pairs. The sqrt term keeps small tables placeable.
  const std::uint64_t needed = (element_capacity * 10 + 8) / 9;
  const std::uint64_t target = 36 * element_capacity;
  std::uint64_t root = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(target)));
  while (root * root < target) ++root;
  while (root > 0 && (root - 1) * (root - 1) >= target) --root;
  constexpr std::uint64_t kGroup = 2 * kBucketSize;
  return (needed + root + kGroup - 1) / kGroup * kGroup;
}

Dictionary::Dictionary(std::uint64_t element_capacity, std::uint64_t fp_range, unsigned tag_bits, std::uint64_t seed)
    : element_capacity_(element_capacity), fp_range_(fp_range), tag_bits_(tag_bits), seed_(seed) {
  if (element_capacity == 0) throw InvalidParams("dictionary capacity must be positive");
  if (fp_range == 0) throw InvalidParams("fingerprint range must be positive");
  if (tag_bits > 32) throw InvalidParams("tags are limited to 32 bits");
  cells_ = cells_for(element_capacity);
  buckets_ = cells_ / kBucketSize;
  perms_ = {KeyedPermutation(fp_range, mix64(seed ^ kPermDomain[0])),
            KeyedPermutation(fp_range, mix64(seed ^ kPermDomain[1]))};
  const std::uint64_t remainder_values = (fp_range + buckets_ - 1) / buckets_;
  remainders_ = PackedArray(cells_, static_cast<unsigned>(std::bit_width(remainder_values - 1)));
  meta_ = PackedArray(cells_, 2 + tag_bits);
}

bool Dictionary::erase(std::uint64_t fp) {
  last_kicks_ = 0;
  last_touched_ = 0;
  if (fp >= fp_range_) return false;
  const std::array<Placement, 2> at = {place(0, fp), place(1, fp)};
  const unsigned distinct = at[0].bucket == at[1].bucket ? 1 : 2;
  for (unsigned b = 0; b < distinct; ++b) {
    for (std::uint64_t slot = 0; slot < kBucketSize; ++slot) {
      const std::uint64_t index = at[b].bucket * kBucketSize + slot;
      ++last_touched_;
      const std::uint64_t meta = meta_.get(index);
      if (!meta_occupied(meta)) continue;
      const Placement& mine = at[meta_choice(meta)];
      if (mine.bucket == at[b].bucket && remainders_.get(index) == mine.remainder) {
        clear_cell(index);
        return true;
      }
    }
  }
  return false;
}

DictCell Dictionary::cell(std::uint64_t index) const {
  if (index >= cells_) throw std::out_of_range("cell index out of range");
  const std::uint64_t meta = meta_.get(index);
  if (!meta_occupied(meta)) return {};
  return {true, recover(meta_choice(meta), index / kBucketSize, remainders_.get(index)), meta_tag(meta)};
}

DictionarySpace Dictionary::bits_used() const {
  DictionarySpace space;
  space.cells = cells_;
  space.remainder_bits = remainders_.width();
  space.tag_bits = tag_bits_;
  space.cell_array_bits = cells_ * space.cell_bits();
  const auto index_bits = static_cast<std::uint64_t>(std::bit_width(cells_));
  space.cursor_bits = index_bits;
  space.occupancy_bits = index_bits;
  space.seed_bits = 64;
  space.walk_state_bits = 64;
  return space;
}

DictionaryState Dictionary::state() const {
  DictionaryState s;
  s.cursor = cursor_;
  s.walk_counter = walk_counter_;
  s.remainder_words.assign(remainders_.words().begin(), remainders_.words().end());
  s.meta_words.assign(meta_.words().begin(), meta_.words().end());
  return s;
}

void Dictionary::restore(const DictionaryState& s) {
  if (s.cursor >= cells_) throw SnapshotError("scan cursor out of range");
  if (s.remainder_words.size() != remainders_.words().size() || s.meta_words.size() != meta_.words().size())
    throw SnapshotError("cell array size does not match dictionary geometry");
  PackedArray remainders = remainders_;
  PackedArray meta = meta_;
  remainders.assign_words(s.remainder_words);
  meta.assign_words(s.meta_words);
  std::uint64_t occupied = 0;
  for (std::uint64_t i = 0; i < cells_; ++i) {
    if (!meta_occupied(meta.get(i))) {
      if (remainders.get(i) != 0) throw SnapshotError("free cell carries a remainder");
      continue;
    }
    // Cells outside [0, R) after un-quotienting cannot come from a valid table.
    if (static_cast<unsigned __int128>(remainders.get(i)) * buckets_ + i / kBucketSize >= fp_range_) throw SnapshotError("cell remainder out of range");
    ++occupied;
  }
  remainders_ = std::move(remainders);
  meta_ = std::move(meta);
  occupancy_ = occupied;
  cursor_ = s.cursor;
  walk_counter_ = s.walk_counter;
}

bool Dictionary::check_invariants() const {
  std::unordered_set<std::uint64_t> seen;
  std::uint64_t occupied = 0;
  for (std::uint64_t i = 0; i < cells_; ++i) {
    const std::uint64_t meta = meta_.get(i);
    if (!meta_occupied(meta)) {
      if (remainders_.get(i) != 0) return false;
      continue;
    }
    ++occupied;
    const unsigned choice = meta_choice(meta);
    const std::uint64_t fp = recover(choice, i / kBucketSize, remainders_.get(i));
    if (fp >= fp_range_ || !seen.insert(fp).second) return false;
    const Placement at = place(choice, fp);
    if (at.bucket != i / kBucketSize || at.remainder != remainders_.get(i)) return false;
  }
  return occupied == occupancy_;
}

}  // namespace slbf
