#include "slbf/filter.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <istream>
#include <iterator>
#include <ostream>
#include <stdexcept>

namespace slbf {

namespace {

constexpr std::uint64_t kHashDomain = 0xA4093822299F31D0ULL;
constexpr std::uint64_t kDictDomain = 0x082EFA98EC4E6C89ULL;

constexpr char kMagic[4] = {'S', 'L', 'B', 'F'};
constexpr std::uint32_t kSnapshotVersion = 1;

std::uint64_t modulus_for(const FilterParams& p, Mode mode) {
  return mode == Mode::kAmortized ? p.c + 2 : p.gen_modulus;
}

unsigned tag_bits_for(const FilterParams& p, Mode mode) {
  return mode == Mode::kAmortized ? static_cast<unsigned>(std::bit_width(p.c + 1)) : p.tag_bits;
}

// A label goes stale (c + 2) generations before it is reused; the scanner must
// sweep the whole table within that many inserts.
std::uint64_t scan_width_for(const FilterParams& p, Mode mode, std::uint64_t cells) {
  if (mode == Mode::kAmortized) return 0;
  const std::uint64_t steps = (p.c + 2) * p.generation_size;
  return std::max<std::uint64_t>(2, (cells + steps - 1) / steps);
}

class ByteWriter {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void raw(const char* data, std::size_t size) { bytes_.insert(bytes_.end(), data, data + size); }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  void put(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
  std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  void raw(char* out, std::size_t size) {
    need(size);
    std::memcpy(out, bytes_.data() + offset_, size);
    offset_ += size;
  }
  std::vector<std::uint64_t> words() {
    const std::uint64_t count = u64();
    if (count > (bytes_.size() - offset_) / 8) throw SnapshotError("snapshot truncated");
    std::vector<std::uint64_t> out(count);
    for (auto& w : out) w = u64();
    return out;
  }
  bool done() const noexcept { return offset_ == bytes_.size(); }

 private:
  void need(std::size_t size) const {
    if (bytes_.size() - offset_ < size) throw SnapshotError("snapshot truncated");
  }
  std::uint64_t get(int width) {
    need(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= std::uint64_t{bytes_[offset_ + i]} << (8 * i);
    offset_ += static_cast<std::size_t>(width);
    return v;
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t offset_ = 0;
};

}  // namespace

const char* to_string(Mode mode) noexcept {
  return mode == Mode::kAmortized ? "amortized" : "deamortized";
}

SlidingFilter::SlidingFilter(const FilterParams& params, std::uint64_t seed, Mode mode)
    : params_(params),
      mode_(mode),
      seed_(seed),
      hash_(UniversalHash::create(params.universe, params.fp_range, mix64(seed ^ kHashDomain))),
      modulus_(modulus_for(params, mode)),
      dict_(params.active_capacity(), params.fp_range, tag_bits_for(params, mode), mix64(seed ^ kDictDomain)),
      scan_width_(scan_width_for(params, mode, dict_.capacity_cells())) {
  if (params != derive(params.n, params.m, params.epsilon, params.universe))
    throw InvalidParams("params were not produced by derive()");
}

SlidingFilter::SlidingFilter(const SlidingFilter& other)
    : params_(other.params_),
      mode_(other.mode_),
      seed_(other.seed_),
      hash_(other.hash_),
      modulus_(other.modulus_),
      dict_(other.dict_),
      scan_width_(other.scan_width_),
      position_(other.position_),
      label_(other.label_),
      label_checks_(other.label_checks_),
      label_violations_(other.label_violations_),
      insert_cost_(other.insert_cost_),
      scan_cost_(other.scan_cost_),
      max_kicks_(other.max_kicks_),
      kicked_inserts_(other.kicked_inserts_),
      max_plain_insert_(other.max_plain_insert_) {
  query_cost_.count = other.query_cost_.count.load();
  query_cost_.total = other.query_cost_.total.load();
  query_cost_.max = other.query_cost_.max.load();
}

SlidingFilter& SlidingFilter::operator=(const SlidingFilter& other) {
  if (this != &other) {
    SlidingFilter copy(other);
    *this = std::move(copy);
  }
  return *this;
}

SlidingFilter::SlidingFilter(SlidingFilter&& other) noexcept
    : params_(std::move(other.params_)),
      mode_(other.mode_),
      seed_(other.seed_),
      hash_(other.hash_),
      modulus_(other.modulus_),
      dict_(std::move(other.dict_)),
      scan_width_(other.scan_width_),
      position_(other.position_),
      label_(other.label_),
      label_checks_(other.label_checks_),
      label_violations_(other.label_violations_),
      insert_cost_(other.insert_cost_),
      scan_cost_(other.scan_cost_),
      max_kicks_(other.max_kicks_),
      kicked_inserts_(other.kicked_inserts_),
      max_plain_insert_(other.max_plain_insert_) {
  query_cost_.count = other.query_cost_.count.load();
  query_cost_.total = other.query_cost_.total.load();
  query_cost_.max = other.query_cost_.max.load();
}

SlidingFilter& SlidingFilter::operator=(SlidingFilter&& other) noexcept {
  params_ = std::move(other.params_);
  mode_ = other.mode_;
  seed_ = other.seed_;
  hash_ = other.hash_;
  modulus_ = other.modulus_;
  dict_ = std::move(other.dict_);
  scan_width_ = other.scan_width_;
  position_ = other.position_;
  label_ = other.label_;
  label_checks_ = other.label_checks_;
  label_violations_ = other.label_violations_;
  insert_cost_ = other.insert_cost_;
  scan_cost_ = other.scan_cost_;
  max_kicks_ = other.max_kicks_;
  kicked_inserts_ = other.kicked_inserts_;
  max_plain_insert_ = other.max_plain_insert_;
  query_cost_.count = other.query_cost_.count.load();
  query_cost_.total = other.query_cost_.total.load();
  query_cost_.max = other.query_cost_.max.load();
  return *this;
}

SlidingFilter::~SlidingFilter() = default;

void SlidingFilter::record(OpCost& cost, std::uint64_t cells) noexcept {
  ++cost.count;
  cost.total_cells += cells;
  cost.max_cells = std::max(cost.max_cells, cells);
}

void SlidingFilter::insert(std::uint64_t x) {
  if (x >= params_.universe) throw std::out_of_range("element outside the universe");
  const auto stale = [this](std::uint32_t tag) { return !is_active(tag); };

  if (mode_ == Mode::kDeamortized) {
    dict_.scan_step(scan_width_, stale);
    record(scan_cost_, dict_.last_touched());
  }

  try {
    dict_.insert_or_update(hash_(x), label_, stale);
  } catch (const InsertOverflow&) {
    record(insert_cost_, dict_.last_touched());
    max_kicks_ = std::max(max_kicks_, dict_.last_kicks());
    ++kicked_inserts_;
    throw;
  }
  const std::uint64_t touched = dict_.last_touched();
  record(insert_cost_, touched);
  if (dict_.last_kicks() > 0) {
    ++kicked_inserts_;
    max_kicks_ = std::max(max_kicks_, dict_.last_kicks());
  } else {
    max_plain_insert_ = std::max(max_plain_insert_, touched);
  }

  if (++position_ == params_.generation_size) {
    position_ = 0;
    advance_label();
  }
}

void SlidingFilter::advance_label() {
  label_ = static_cast<std::uint32_t>((label_ + 1) % modulus_);
  if (mode_ == Mode::kAmortized) {
    // Exactly one label, the one c + 1 generations back, has just expired.
    dict_.scan_step(dict_.capacity_cells(), [this](std::uint32_t tag) { return !is_active(tag); });
    record(scan_cost_, dict_.last_touched());
  }
  if (label_checks_) {
    for (std::uint64_t i = 0; i < dict_.capacity_cells(); ++i) {
      const DictCell cell = dict_.cell(i);
      if (cell.occupied && cell.tag == label_) ++label_violations_;
    }
  }
}

bool SlidingFilter::query(std::uint64_t x) const {
  if (x >= params_.universe) throw std::out_of_range("element outside the universe");
  std::uint64_t touched = 0;
  const bool hit =
      dict_.member(hash_(x), [this](std::uint32_t tag) { return !is_active(tag); }, &touched).has_value();
  query_cost_.count.fetch_add(1, std::memory_order_relaxed);
  query_cost_.total.fetch_add(touched, std::memory_order_relaxed);
  std::uint64_t seen = query_cost_.max.load(std::memory_order_relaxed);
  while (touched > seen && !query_cost_.max.compare_exchange_weak(seen, touched, std::memory_order_relaxed)) {
  }
  return hit;
}

std::uint64_t SlidingFilter::active_elements() const {
  std::uint64_t active = 0;
  for (std::uint64_t i = 0; i < dict_.capacity_cells(); ++i) {
    const DictCell cell = dict_.cell(i);
    if (cell.occupied && is_active(cell.tag)) ++active;
  }
  return active;
}

SpaceReport SlidingFilter::bits_used() const {
  SpaceReport report;
  report.dictionary = dict_.bits_used();
  report.counter_bits = static_cast<std::uint64_t>(std::bit_width(params_.generation_size - 1)) +
                        static_cast<std::uint64_t>(std::bit_width(modulus_ - 1));
  report.hash_bits = 2 * static_cast<std::uint64_t>(std::bit_width(hash_.modulus()));
  return report;
}

CostReport SlidingFilter::step_cost_stats() const {
  CostReport report;
  report.query.count = query_cost_.count.load(std::memory_order_relaxed);
  report.query.total_cells = query_cost_.total.load(std::memory_order_relaxed);
  report.query.max_cells = query_cost_.max.load(std::memory_order_relaxed);
  report.insert = insert_cost_;
  report.scan = scan_cost_;
  report.max_kicks = max_kicks_;
  report.kicked_inserts = kicked_inserts_;
  report.max_insert_cells_without_kicks = max_plain_insert_;
  return report;
}

void SlidingFilter::reset_cost_stats() noexcept {
  insert_cost_ = {};
  scan_cost_ = {};
  max_kicks_ = 0;
  kicked_inserts_ = 0;
  max_plain_insert_ = 0;
  query_cost_.count = 0;
  query_cost_.total = 0;
  query_cost_.max = 0;
}

std::vector<std::uint8_t> SlidingFilter::snapshot() const {
  ByteWriter w;
  w.raw(kMagic, sizeof kMagic);
  w.u32(kSnapshotVersion);
  w.u8(static_cast<std::uint8_t>(mode_));
  w.u8(params_.m.is_infinite() ? 1 : 0);
  w.u16(0);
  w.u32(0);
  w.u64(params_.n);
  w.u64(params_.m.is_infinite() ? 0 : params_.m.value());
  w.u64(std::bit_cast<std::uint64_t>(params_.epsilon));
  w.u64(params_.universe);
  w.u64(seed_);
  w.u64(hash_.modulus());
  w.u64(hash_.multiplier());
  w.u64(hash_.range());
  w.u64(position_);
  w.u64(label_);
  const DictionaryState state = dict_.state();
  w.u64(state.cursor);
  w.u64(state.walk_counter);
  w.u64(dict_.capacity_cells());
  const DictionarySpace space = dict_.bits_used();
  w.u32(space.remainder_bits);
  w.u32(2 + space.tag_bits);
  w.u64(state.remainder_words.size());
  for (std::uint64_t word : state.remainder_words) w.u64(word);
  w.u64(state.meta_words.size());
  for (std::uint64_t word : state.meta_words) w.u64(word);
  return w.take();
}

SlidingFilter SlidingFilter::restore(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  char magic[4];
  r.raw(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw SnapshotError("bad snapshot magic");
  if (const std::uint32_t version = r.u32(); version != kSnapshotVersion)
    throw SnapshotError("unsupported snapshot version " + std::to_string(version));
  const std::uint8_t mode_byte = r.u8();
  if (mode_byte > 1) throw SnapshotError("unknown filter mode");
  const bool infinite = r.u8() != 0;
  if (r.u16() != 0 || r.u32() != 0) throw SnapshotError("reserved snapshot bytes must be zero");
  const std::uint64_t n = r.u64();
  const std::uint64_t m = r.u64();
  const double epsilon = std::bit_cast<double>(r.u64());
  const std::uint64_t universe = r.u64();
  const std::uint64_t seed = r.u64();

  FilterParams params;
  try {
    params = derive(n, infinite ? Slack::infinite() : Slack::elements(m), epsilon, universe);
  } catch (const InvalidParams& e) {
    throw SnapshotError(std::string("snapshot parameters invalid: ") + e.what());
  }
  SlidingFilter filter(params, seed, static_cast<Mode>(mode_byte));

  const std::uint64_t p = r.u64();
  const std::uint64_t a = r.u64();
  const std::uint64_t range = r.u64();
  if (p != filter.hash_.modulus() || a != filter.hash_.multiplier() || range != filter.hash_.range())
    throw SnapshotError("hash description does not match seed");
  const std::uint64_t position = r.u64();
  const std::uint64_t label = r.u64();
  if (position >= params.generation_size || label >= filter.modulus_) throw SnapshotError("counters out of range");

  DictionaryState state;
  state.cursor = r.u64();
  state.walk_counter = r.u64();
  const std::uint64_t cells = r.u64();
  const std::uint32_t remainder_width = r.u32();
  const std::uint32_t meta_width = r.u32();
  const DictionarySpace space = filter.dict_.bits_used();
  if (cells != filter.dict_.capacity_cells() || remainder_width != space.remainder_bits ||
      meta_width != 2 + space.tag_bits)
    throw SnapshotError("cell layout does not match parameters");
  state.remainder_words = r.words();
  state.meta_words = r.words();
  if (!r.done()) throw SnapshotError("trailing bytes after snapshot");
  filter.dict_.restore(state);

  filter.position_ = position;
  filter.label_ = static_cast<std::uint32_t>(label);
  for (std::uint64_t i = 0; i < cells; ++i) {
    const DictCell cell = filter.dict_.cell(i);
    if (cell.occupied && cell.tag >= filter.modulus_) throw SnapshotError("cell tag out of range");
  }
  return filter;
}

void SlidingFilter::save(std::ostream& out) const {
  const std::vector<std::uint8_t> bytes = snapshot();
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed to write snapshot");
}

SlidingFilter SlidingFilter::load(std::istream& in) {
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return restore(bytes);
}

}  // namespace slbf
