#pragma once

#include <cstdint>
#include <deque>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "slbf/filter.hpp"
#include "slbf/params.hpp"

namespace slbf {

/// Synthetic stream shapes used by the validation drivers.
enum class StreamPattern {
  kDistinct,          // fresh pseudo-random element every step
  kRandomDuplicates,  // uniform draws from a pool of about 1.5n elements
  kAllSame,           // one element repeated
  kRoundRobin,        // cycle through n + 1 elements, each leaving the window just before it returns
  kEdgeBursts,        // fresh elements, with bursts re-inserting elements at ages n-1, n, n+1
};

const char* to_string(StreamPattern pattern) noexcept;
StreamPattern parse_stream_pattern(const std::string& name);

class StreamGenerator {
 public:
  StreamGenerator(StreamPattern pattern, std::uint64_t n, std::uint64_t universe, std::uint64_t seed);
  std::uint64_t next();

 private:
  std::uint64_t fresh();

  StreamPattern pattern_;
  std::uint64_t n_;
  std::uint64_t universe_;
  std::mt19937_64 rng_;
  std::uint64_t step_ = 0;
  std::uint64_t pool_;
  std::uint64_t base_;
  std::deque<std::uint64_t> history_;  // last n + 2 emitted, for edge bursts
  unsigned burst_left_ = 0;
};

struct FprReport {
  FilterParams params;
  std::uint64_t seed = 0;
  std::uint64_t stream_len = 0;
  std::uint64_t trials = 0;
  std::uint64_t yes_count = 0;
  double estimate = 0.0;
  double bound = 0.0;
  double three_sigma = 0.0;
  bool pass = false;
  /// epsilon * trials < 20: too few expected hits for the 3-sigma test to mean much.
  bool underpowered = false;
  std::uint64_t hash_modulus = 0;
  std::uint64_t hash_multiplier = 0;
};

/// Inserts `stream_len` distinct elements and, at 10 evenly spaced checkpoints
/// past position n + m, queries trials/10 elements that were never inserted.
FprReport measure_fpr(std::uint64_t n, Slack m, double epsilon, std::uint64_t stream_len, std::uint64_t trials,
                      std::uint64_t seed, std::uint64_t universe = kMaxUniverse);

struct CensusPoint {
  std::uint64_t step = 0;
  std::uint64_t false_positives = 0;
  std::uint64_t active_elements = 0;
};

struct FpCensus {
  FilterParams params;
  std::uint64_t seed = 0;
  std::uint64_t universe = 0;
  double bound = 0.0;  // epsilon * u + n'
  std::vector<CensusPoint> checkpoints;
  std::uint64_t max_false_positives = 0;
  bool pass = false;
};

/// Exhaustive false-positive count over the whole universe. `universe` must be
/// a prime >= the fingerprint range so that the hash modulus equals u.
/// Checkpoints sit at generation boundaries and mid-generation, at most
/// `max_checkpoints` of them, all after the first n + m inserts.
FpCensus census_false_positives(std::uint64_t n, Slack m, double epsilon, std::uint64_t universe,
                                std::uint64_t seed, std::uint64_t max_checkpoints = 16);

struct SpaceVsBounds {
  FilterParams params;
  SpaceReport space;
  double measured_bits = 0.0;
  double lower_bound_bits = 0.0;
  double upper_bound_bits = 0.0;
  double ratio = 0.0;              // measured / lower
  double overhead_fraction = 0.0;  // counters + hash over total
};

SpaceVsBounds space_report(std::uint64_t n, Slack m, double epsilon, std::uint64_t seed,
                           std::uint64_t universe = kMaxUniverse);

struct PassReport {
  FilterParams params;
  Mode mode = Mode::kDeamortized;
  StreamPattern pattern = StreamPattern::kRandomDuplicates;
  std::uint64_t steps = 0;
  std::uint64_t probes = 0;
  std::uint64_t false_negatives = 0;
  std::uint64_t label_violations = 0;
  std::uint64_t max_active_elements = 0;
  std::uint64_t final_active_elements = 0;
  bool pass = false;
};

/// Runs `steps` inserts with label-reuse checks armed, and after every insert
/// checks the newest, the oldest in-window and two random in-window elements
/// against the exact oracle.
PassReport stress_label_safety(std::uint64_t n, Slack m, double epsilon, std::uint64_t steps, std::uint64_t seed,
                               StreamPattern pattern = StreamPattern::kRandomDuplicates,
                               Mode mode = Mode::kDeamortized, std::uint64_t universe = kMaxUniverse);

nlohmann::json to_json(const FilterParams& params);
nlohmann::json to_json(const FprReport& report);
nlohmann::json to_json(const FpCensus& census);
nlohmann::json to_json(const SpaceVsBounds& report);
nlohmann::json to_json(const PassReport& report);
nlohmann::json to_json(const CostReport& report);

}  // namespace slbf
