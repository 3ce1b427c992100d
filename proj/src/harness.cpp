#include "slbf/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "slbf/error.hpp"
#include "slbf/hashing.hpp"
#include "slbf/oracle.hpp"

namespace slbf {

namespace {

constexpr std::uint64_t kFprCheckpoints = 10;

std::uint64_t finite_slack(Slack m) { return m.is_infinite() ? 0 : m.value(); }

nlohmann::json slack_json(Slack m) {
  if (m.is_infinite()) return "inf";
  return m.value();
}

}  // namespace

const char* to_string(StreamPattern pattern) noexcept {
  switch (pattern) {
    case StreamPattern::kDistinct:
      return "distinct";
    case StreamPattern::kRandomDuplicates:
      return "random-duplicates";
    case StreamPattern::kAllSame:
      return "all-same";
    case StreamPattern::kRoundRobin:
      return "round-robin";
    case StreamPattern::kEdgeBursts:
      return "edge-bursts";
  }
  return "?";
}

StreamPattern parse_stream_pattern(const std::string& name) {
  for (StreamPattern p : {StreamPattern::kDistinct, StreamPattern::kRandomDuplicates, StreamPattern::kAllSame,
                          StreamPattern::kRoundRobin, StreamPattern::kEdgeBursts}) {
    if (name == to_string(p)) return p;
  }
  throw InvalidParams("unknown stream pattern '" + name + "'");
}

StreamGenerator::StreamGenerator(StreamPattern pattern, std::uint64_t n, std::uint64_t universe, std::uint64_t seed)
    : pattern_(pattern), n_(n), universe_(universe), rng_(seed) {
  if (universe < 2) throw InvalidParams("stream universe must contain at least two elements");
  const std::uint64_t wanted = pattern == StreamPattern::kRoundRobin ? n + 1 : n + n / 2 + 1;
  pool_ = std::min(universe, wanted);
  base_ = uniform_below(rng_, universe - pool_ + 1);
}

std::uint64_t StreamGenerator::fresh() { return uniform_below(rng_, universe_); }

std::uint64_t StreamGenerator::next() {
  std::uint64_t x = 0;
  switch (pattern_) {
    case StreamPattern::kDistinct:
      x = fresh();
      break;
    case StreamPattern::kRandomDuplicates:
      x = base_ + uniform_below(rng_, pool_);
      break;
    case StreamPattern::kAllSame:
      x = base_;
      break;
    case StreamPattern::kRoundRobin:
      x = base_ + step_ % pool_;
      break;
    case StreamPattern::kEdgeBursts:
      if (burst_left_ == 0 && history_.size() == n_ + 2 && uniform_below(rng_, 16) == 0) burst_left_ = 3;
      if (burst_left_ > 0) {
        // Ages n-1, n, n+1 straddle the window edge.
        const std::uint64_t age = n_ - 1 + uniform_below(rng_, 3);
        x = history_[history_.size() - 1 - age];
        --burst_left_;
      } else {
        x = fresh();
      }
      history_.push_back(x);
      if (history_.size() > n_ + 2) history_.pop_front();
      break;
  }
  ++step_;
  return x;
}

FprReport measure_fpr(std::uint64_t n, Slack m, double epsilon, std::uint64_t stream_len, std::uint64_t trials,
                      std::uint64_t seed, std::uint64_t universe) {
  const FilterParams params = derive(n, m, epsilon, universe);
  const std::uint64_t start = n + finite_slack(m);
  if (stream_len < start) throw InvalidParams("stream_len must be at least n + m");
  if (trials == 0) throw InvalidParams("trials must be positive");

  SlidingFilter filter(params, seed);
  // Stream elements are even and probes odd, so no probe was ever inserted.
  std::mt19937_64 rng(mix64(seed ^ 0x5BF03635F2A7C0E1ULL));
  const std::uint64_t halves = universe / 2;
  auto stream_element = [&] { return 2 * uniform_below(rng, halves); };
  auto probe_element = [&] { return 2 * uniform_below(rng, halves) + 1; };

  FprReport report;
  report.params = params;
  report.seed = seed;
  report.stream_len = stream_len;
  report.trials = trials;
  report.hash_modulus = filter.hash().modulus();
  report.hash_multiplier = filter.hash().multiplier();

  std::uint64_t inserted = 0;
  for (std::uint64_t k = 0; k < kFprCheckpoints; ++k) {
    const std::uint64_t checkpoint = start + ((k + 1) * (stream_len - start) + kFprCheckpoints - 1) / kFprCheckpoints;
    for (; inserted < checkpoint; ++inserted) filter.insert(stream_element());
    const std::uint64_t share = trials / kFprCheckpoints + (k < trials % kFprCheckpoints ? 1 : 0);
    for (std::uint64_t q = 0; q < share; ++q) {
      if (filter.query(probe_element())) ++report.yes_count;
    }
  }

  report.estimate = static_cast<double>(report.yes_count) / static_cast<double>(trials);
  report.bound = epsilon;
  report.three_sigma = 3.0 * std::sqrt(epsilon * (1.0 - epsilon) / static_cast<double>(trials));
  report.pass = report.estimate <= epsilon + report.three_sigma;
  report.underpowered = epsilon * static_cast<double>(trials) < 20.0;
  return report;
}

FpCensus census_false_positives(std::uint64_t n, Slack m, double epsilon, std::uint64_t universe,
                                std::uint64_t seed, std::uint64_t max_checkpoints) {
  const FilterParams params = derive(n, m, epsilon, universe);
  SlidingFilter filter(params, seed);
  if (filter.hash().modulus() != universe)
    throw InvalidParams("census needs a prime universe no smaller than the fingerprint range");

  const std::uint64_t g = params.generation_size;
  const std::uint64_t warmup = n + finite_slack(m);
  const std::uint64_t length = std::min(universe, warmup + 2 * (params.c + 2) * g);

  // Candidate checkpoints: every generation boundary and mid-generation point past the warmup.
  std::vector<std::uint64_t> candidates;
  for (std::uint64_t t = warmup; t <= length; ++t) {
    if (t % g == 0 || t % g == g / 2) candidates.push_back(t);
  }
  if (candidates.empty()) candidates.push_back(length);
  std::vector<std::uint64_t> checkpoints;
  const std::uint64_t keep = std::max<std::uint64_t>(1, std::min<std::uint64_t>(max_checkpoints, candidates.size()));
  for (std::uint64_t k = 0; k < keep; ++k) {
    checkpoints.push_back(candidates[keep == 1 ? candidates.size() - 1 : k * (candidates.size() - 1) / (keep - 1)]);
  }
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());

  // Distinct elements: a prefix of a seeded Fisher-Yates shuffle of [0, u).
  std::vector<std::uint64_t> elements(universe);
  std::iota(elements.begin(), elements.end(), std::uint64_t{0});
  std::mt19937_64 rng(mix64(seed ^ 0x3C6EF372FE94F82BULL));
  for (std::uint64_t i = 0; i < length; ++i) std::swap(elements[i], elements[i + uniform_below(rng, universe - i)]);

  FpCensus census;
  census.params = params;
  census.seed = seed;
  census.universe = universe;
  census.bound = epsilon * static_cast<double>(universe) + static_cast<double>(params.n_prime);

  WindowOracle oracle(n, m);
  std::uint64_t t = 0;
  for (std::uint64_t checkpoint : checkpoints) {
    for (; t < checkpoint; ++t) {
      filter.insert(elements[t]);
      oracle.push(elements[t]);
    }
    CensusPoint point;
    point.step = t;
    point.active_elements = filter.active_elements();
    for (std::uint64_t x = 0; x < universe; ++x) {
      if (filter.query(x) && oracle.classify(x) == WindowClass::kOut) ++point.false_positives;
    }
    census.max_false_positives = std::max(census.max_false_positives, point.false_positives);
    census.checkpoints.push_back(point);
  }
  census.pass = static_cast<double>(census.max_false_positives) <= census.bound;
  return census;
}

SpaceVsBounds space_report(std::uint64_t n, Slack m, double epsilon, std::uint64_t seed, std::uint64_t universe) {
  const FilterParams params = derive(n, m, epsilon, universe);
  const SlidingFilter filter(params, seed);
  SpaceVsBounds report;
  report.params = params;
  report.space = filter.bits_used();
  report.measured_bits = static_cast<double>(report.space.total_bits());
  report.lower_bound_bits = lower_bound_bits(n, m, epsilon);
  report.upper_bound_bits = upper_bound_bits(n, m, epsilon);
  report.ratio = report.measured_bits / report.lower_bound_bits;
  report.overhead_fraction =
      static_cast<double>(report.space.counter_bits + report.space.hash_bits) / report.measured_bits;
  return report;
}

PassReport stress_label_safety(std::uint64_t n, Slack m, double epsilon, std::uint64_t steps, std::uint64_t seed,
                               StreamPattern pattern, Mode mode, std::uint64_t universe) {
  const FilterParams params = derive(n, m, epsilon, universe);
  SlidingFilter filter(params, seed, mode);
  filter.set_label_checks(true);
  WindowOracle oracle(n, m);
  StreamGenerator stream(pattern, n, universe, mix64(seed ^ 0x9216D5D98979FB1BULL));
  std::mt19937_64 rng(mix64(seed ^ 0xD1310BA698DFB5ACULL));

  PassReport report;
  report.params = params;
  report.mode = mode;
  report.pattern = pattern;
  report.steps = steps;

  auto probe = [&](std::uint64_t age) {
    ++report.probes;
    if (!filter.query(oracle.at_age(age))) ++report.false_negatives;
  };

  for (std::uint64_t step = 0; step < steps; ++step) {
    const std::uint64_t x = stream.next();
    filter.insert(x);
    oracle.push(x);
    const std::uint64_t window = std::min<std::uint64_t>(n, oracle.time());
    probe(0);
    probe(window - 1);
    probe(uniform_below(rng, window));
    probe(uniform_below(rng, window));
    if (filter.position() == 0) report.max_active_elements = std::max(report.max_active_elements, filter.active_elements());
  }
  report.final_active_elements = filter.active_elements();
  report.max_active_elements = std::max(report.max_active_elements, report.final_active_elements);
  report.label_violations = filter.label_violations();
  report.pass = report.false_negatives == 0 && report.label_violations == 0 &&
                report.max_active_elements <= params.active_capacity();
  return report;
}

nlohmann::json to_json(const FilterParams& p) {
  return {{"n", p.n},
          {"m", slack_json(p.m)},
          {"epsilon", p.epsilon},
          {"universe", p.universe},
          {"c", p.c},
          {"generation_size", p.generation_size},
          {"n_prime", p.n_prime},
          {"fp_range", p.fp_range},
          {"gen_modulus", p.gen_modulus},
          {"tag_bits", p.tag_bits}};
}

nlohmann::json to_json(const FprReport& r) {
  return {{"schema", "slbf.fpr/1"},
          {"params", to_json(r.params)},
          {"seed", r.seed},
          {"hash", {{"p", r.hash_modulus}, {"a", r.hash_multiplier}, {"range", r.params.fp_range}}},
          {"stream_len", r.stream_len},
          {"trials", r.trials},
          {"yes_count", r.yes_count},
          {"estimate", r.estimate},
          {"bound", r.bound},
          {"three_sigma", r.three_sigma},
          {"pass", r.pass},
          {"underpowered", r.underpowered}};
}

nlohmann::json to_json(const FpCensus& c) {
  nlohmann::json points = nlohmann::json::array();
  for (const CensusPoint& p : c.checkpoints) {
    points.push_back({{"step", p.step}, {"false_positives", p.false_positives}, {"active_elements", p.active_elements}});
  }
  return {{"schema", "slbf.census/1"},
          {"params", to_json(c.params)},
          {"seed", c.seed},
          {"universe", c.universe},
          {"bound", c.bound},
          {"checkpoints", points},
          {"max_false_positives", c.max_false_positives},
          {"pass", c.pass}};
}

nlohmann::json to_json(const SpaceVsBounds& r) {
  const DictionarySpace& d = r.space.dictionary;
  return {{"schema", "slbf.space/1"},
          {"params", to_json(r.params)},
          {"measured_bits", r.measured_bits},
          {"lower_bound_bits", r.lower_bound_bits},
          {"upper_bound_bits", r.upper_bound_bits},
          {"ratio", r.ratio},
          {"overhead_fraction", r.overhead_fraction},
          {"breakdown",
           {{"cells", d.cells},
            {"cell_bits", d.cell_bits()},
            {"remainder_bits", d.remainder_bits},
            {"tag_bits", d.tag_bits},
            {"cell_array_bits", d.cell_array_bits},
            {"dictionary_overhead_bits", d.overhead_bits()},
            {"counter_bits", r.space.counter_bits},
            {"hash_bits", r.space.hash_bits}}}};
}

nlohmann::json to_json(const PassReport& r) {
  return {{"schema", "slbf.stress/1"},
          {"params", to_json(r.params)},
          {"mode", to_string(r.mode)},
          {"pattern", to_string(r.pattern)},
          {"steps", r.steps},
          {"probes", r.probes},
          {"false_negatives", r.false_negatives},
          {"label_violations", r.label_violations},
          {"max_active_elements", r.max_active_elements},
          {"final_active_elements", r.final_active_elements},
          {"pass", r.pass}};
}

nlohmann::json to_json(const CostReport& r) {
  auto op = [](const OpCost& c) {
    return nlohmann::json{{"count", c.count}, {"max_cells", c.max_cells}, {"mean_cells", c.mean_cells()}};
  };
  return {{"query", op(r.query)},
          {"insert", op(r.insert)},
          {"scan", op(r.scan)},
          {"max_kicks", r.max_kicks},
          {"kicked_inserts", r.kicked_inserts},
          {"max_insert_cells_without_kicks", r.max_insert_cells_without_kicks}};
}

}  // namespace slbf
