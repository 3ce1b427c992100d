// Acceptance suite. Prints one [PASS]/[FAIL] line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "slbf/error.hpp"
#include "slbf/filter.hpp"
#include "slbf/harness.hpp"
#include "slbf/hashing.hpp"
#include "slbf/oracle.hpp"
#include "slbf/params.hpp"

using namespace slbf;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Runs job(i) for i in [0, count) on all hardware threads. The first
// exception thrown by a job is rethrown here.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& job) {
  const unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      try {
        for (std::size_t i = next++; i < count; i = next++) job(i);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::string slack_name(Slack m) { return m.to_string(); }

std::vector<Slack> slack_grid(std::uint64_t n, double epsilon) {
  const auto log_inv = static_cast<std::uint64_t>(std::llround(std::log2(1.0 / epsilon)));
  return {Slack::elements(1), Slack::elements(std::max<std::uint64_t>(1, (n + log_inv - 1) / log_inv)),
          Slack::elements(n), Slack::infinite()};
}

// ---------------------------------------------------------------------------

Outcome ac1_no_false_negatives() {
  struct Job {
    std::uint64_t n;
    Slack m;
    double epsilon;
    StreamPattern pattern;
    std::uint64_t length;
    std::uint64_t seed;
  };
  const std::vector<std::uint64_t> ns = {100, 1000, 10000};
  const std::vector<double> eps = {1.0 / 16, 1.0 / 1024};
  const std::vector<StreamPattern> patterns = {StreamPattern::kRandomDuplicates, StreamPattern::kEdgeBursts,
                                               StreamPattern::kRoundRobin, StreamPattern::kAllSame,
                                               StreamPattern::kDistinct};
  std::vector<Job> configs;
  for (std::uint64_t n : ns)
    for (double e : eps)
      for (Slack m : slack_grid(n, e)) configs.push_back({n, m, e, StreamPattern::kDistinct, 0, 0});

  // 100 streams: every configuration at least four times, patterns rotating,
  // lengths log-spaced from 10^3 to 10^6 with the longest reserved for a few.
  std::vector<Job> jobs;
  std::mt19937_64 rng(2024);
  for (std::size_t i = 0; i < 100; ++i) {
    Job job = configs[i % configs.size()];
    job.pattern = patterns[i % patterns.size()];
    job.seed = 1000 + i;
    job.length = i % 25 == 0 ? 1000000 : static_cast<std::uint64_t>(std::pow(10.0, 3.0 + 2.5 * (rng() % 1000) / 1000.0));
    jobs.push_back(job);
  }

  std::atomic<std::uint64_t> violations{0}, probes{0}, steps{0};
  std::mutex mu;
  std::string first_failure;
  parallel_for(jobs.size(), [&](std::size_t i) {
    const Job& job = jobs[i];
    const FilterParams params = derive(job.n, job.m, job.epsilon);
    SlidingFilter filter(params, job.seed);
    WindowOracle oracle(job.n, job.m);
    StreamGenerator stream(job.pattern, job.n, params.universe, job.seed);
    std::mt19937_64 pick(job.seed);
    std::uint64_t local_violations = 0, local_probes = 0;
    auto probe = [&](std::uint64_t age) {
      ++local_probes;
      if (!filter.query(oracle.at_age(age))) ++local_violations;
    };
    for (std::uint64_t t = 0; t < job.length; ++t) {
      const std::uint64_t x = stream.next();
      filter.insert(x);
      oracle.push(x);
      const std::uint64_t window = std::min(job.n, oracle.time());
      probe(0);
      probe(window - 1);
      probe(pick() % window);
      probe(pick() % window);
      // Whole window every n steps.
      if (t % job.n == job.n - 1) {
        for (std::uint64_t age = 0; age < window; ++age) probe(age);
      }
    }
    violations += local_violations;
    probes += local_probes;
    steps += job.length;
    if (local_violations) {
      std::lock_guard lock(mu);
      if (first_failure.empty()) {
        first_failure = " first failure n=" + std::to_string(job.n) + " m=" + slack_name(job.m) +
                        " pattern=" + to_string(job.pattern);
      }
    }
  });
  Outcome out;
  out.pass = violations == 0;
  out.detail = "streams=100 steps=" + std::to_string(steps.load()) + " probes=" + std::to_string(probes.load()) +
               " violations=" + std::to_string(violations.load()) + first_failure;
  return out;
}

// ---------------------------------------------------------------------------

Outcome ac2_fpr() {
  struct Config {
    std::uint64_t n;
    Slack m;
    double epsilon;
  };
  std::vector<Config> configs;
  for (std::uint64_t n : {100, 1000, 10000})
    for (double e : {1.0 / 16, 1.0 / 64})
      for (Slack m : slack_grid(n, e)) configs.push_back({n, m, e});
  constexpr std::uint64_t kSeeds = 30;
  constexpr std::uint64_t kTrials = 100000;

  std::vector<std::atomic<std::uint64_t>> failures(configs.size());
  std::vector<double> worst(configs.size(), 0.0);
  std::mutex mu;
  parallel_for(configs.size() * kSeeds, [&](std::size_t job) {
    const Config& cfg = configs[job / kSeeds];
    const std::uint64_t seed = 1 + job % kSeeds;
    const std::uint64_t slack = cfg.m.is_infinite() ? 0 : cfg.m.value();
    const FprReport r = measure_fpr(cfg.n, cfg.m, cfg.epsilon, 2 * (cfg.n + slack), kTrials, seed);
    if (!r.pass) ++failures[job / kSeeds];
    std::lock_guard lock(mu);
    worst[job / kSeeds] = std::max(worst[job / kSeeds], r.estimate / cfg.epsilon);
  });

  Outcome out;
  std::uint64_t total_failures = 0;
  std::size_t bad_configs = 0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    total_failures += failures[i];
    if (failures[i] > 1) {
      ++bad_configs;
      out.pass = false;
    }
  }
  out.detail = "configs=" + std::to_string(configs.size()) + " seeds=30 T=1e5 seed_failures=" +
               std::to_string(total_failures) + " configs_over_limit=" + std::to_string(bad_configs) +
               " worst_estimate/eps=" + std::to_string(*std::max_element(worst.begin(), worst.end()));
  return out;
}

// ---------------------------------------------------------------------------

Outcome ac3_census() {
  struct Config {
    std::uint64_t n;
    Slack m;
    double epsilon;
    std::uint64_t universe;
  };
  std::vector<Config> configs;
  for (std::uint64_t u : {10007, 100003, 1000003}) {
    for (double e : {0.05, 0.1}) {
      const auto big = static_cast<std::uint64_t>(e * static_cast<double>(u) / 4);
      for (std::uint64_t n : {std::uint64_t{10}, big}) {
        for (Slack m : {Slack::elements(1), Slack::elements(n), Slack::infinite()}) configs.push_back({n, m, e, u});
      }
    }
  }
  std::atomic<std::uint64_t> failures{0}, checkpoints{0};
  std::mutex mu;
  double worst = 0.0;
  parallel_for(configs.size(), [&](std::size_t i) {
    const Config& c = configs[i];
    const std::uint64_t max_checkpoints = c.universe > 500000 ? 6 : 16;
    const FpCensus census = census_false_positives(c.n, c.m, c.epsilon, c.universe, 77 + i, max_checkpoints);
    checkpoints += census.checkpoints.size();
    if (!census.pass) ++failures;
    std::lock_guard lock(mu);
    worst = std::max(worst, static_cast<double>(census.max_false_positives) / census.bound);
  });
  Outcome out;
  out.pass = failures == 0;
  out.detail = "censuses=" + std::to_string(configs.size()) + " checkpoints=" + std::to_string(checkpoints.load()) +
               " failures=" + std::to_string(failures.load()) + " worst_count/bound=" + std::to_string(worst);
  return out;
}

// ---------------------------------------------------------------------------

Outcome ac4_constant_work() {
  constexpr std::uint64_t kSeeds = 30;
  constexpr std::uint64_t kInserts = 10000000;
  constexpr std::uint64_t kQueries = 1000000;
  const FilterParams params = derive(1 << 14, Slack::elements(1 << 14), 1.0 / 1024);

  std::mutex mu;
  CostReport worst;
  std::uint64_t overflows = 0;
  std::uint64_t scan_width = 0;
  double max_load = 0.0;
  parallel_for(kSeeds, [&](std::size_t s) {
    SlidingFilter filter(params, 500 + s);
    std::mt19937_64 rng(500 + s);
    std::uint64_t local_overflows = 0;
    for (std::uint64_t i = 0; i < kInserts; ++i) {
      try {
        filter.insert(rng() % params.universe);
      } catch (const InsertOverflow&) {
        ++local_overflows;
      }
    }
    for (std::uint64_t i = 0; i < kQueries; ++i) filter.query(rng() % params.universe);
    const CostReport r = filter.step_cost_stats();
    const double load = static_cast<double>(params.active_capacity()) /
                        static_cast<double>(filter.dictionary().capacity_cells());
    std::lock_guard lock(mu);
    overflows += local_overflows;
    scan_width = std::max(scan_width, filter.scan_width());
    max_load = std::max(max_load, load);
    worst.query.max_cells = std::max(worst.query.max_cells, r.query.max_cells);
    worst.scan.max_cells = std::max(worst.scan.max_cells, r.scan.max_cells);
    worst.max_insert_cells_without_kicks =
        std::max(worst.max_insert_cells_without_kicks, r.max_insert_cells_without_kicks);
    worst.max_kicks = std::max(worst.max_kicks, r.max_kicks);
    worst.kicked_inserts += r.kicked_inserts;
  });

  Outcome out;
  out.pass = worst.query.max_cells <= 8 && worst.max_insert_cells_without_kicks <= 8 && worst.scan.max_cells <= 2 &&
             worst.max_kicks < Dictionary::kMaxKicks && overflows == 0 && max_load <= 0.9;
  std::ostringstream detail;
  detail << "seeds=30 inserts/seed=1e7 query_max_cells=" << worst.query.max_cells
         << " insert_max_cells_no_kick=" << worst.max_insert_cells_without_kicks
         << " scan_max_cells=" << worst.scan.max_cells << " max_kicks=" << worst.max_kicks << "/"
         << Dictionary::kMaxKicks << " kicked_inserts=" << worst.kicked_inserts << " overflows=" << overflows
         << " live_load=" << max_load;
  out.detail = detail.str();
  return out;
}

// ---------------------------------------------------------------------------

Outcome ac5_space() {
  const SpaceVsBounds tight = space_report(1 << 16, Slack::elements(1 << 16), 1.0 / 1024, 1);
  const SpaceVsBounds loose = space_report(1 << 16, Slack::elements(1 << 16), 1.0 / 64, 1);
  Outcome out;
  out.pass = tight.ratio <= 2.5 && loose.ratio <= 3.0;
  std::ostringstream detail;
  detail << "ratio(eps=2^-10)=" << tight.ratio << " (limit 2.5) ratio(eps=2^-6)=" << loose.ratio << " (limit 3.0)";
  out.detail = detail.str();
  return out;
}

// ---------------------------------------------------------------------------

Outcome ac6_labels_and_modes() {
  struct Stress {
    std::string name;
    std::uint64_t n;
    Slack m;
    double epsilon;
  };
  const std::vector<Stress> stresses = {
      {"c=1", 1000, Slack::infinite(), 0.5},
      {"c=100", 1000, Slack::elements(10), 1.0 / 16},
      {"g=1", 100, Slack::elements(1), 1.0 / 16},
  };
  struct StressJob {
    std::size_t which;
    Mode mode;
    StreamPattern pattern;
  };
  std::vector<StressJob> jobs;
  for (std::size_t i = 0; i < stresses.size(); ++i)
    for (Mode mode : {Mode::kDeamortized, Mode::kAmortized})
      for (StreamPattern p : {StreamPattern::kRandomDuplicates, StreamPattern::kDistinct})
        jobs.push_back({i, mode, p});

  std::atomic<std::uint64_t> stress_failures{0}, label_violations{0}, false_negatives{0};
  std::mutex mu;
  std::string extremes;
  parallel_for(jobs.size(), [&](std::size_t j) {
    const StressJob& job = jobs[j];
    const Stress& s = stresses[job.which];
    const PassReport r = stress_label_safety(s.n, s.m, s.epsilon, 1000000, 31 + j, job.pattern, job.mode);
    label_violations += r.label_violations;
    false_negatives += r.false_negatives;
    if (!r.pass) ++stress_failures;
    if (job.mode == Mode::kDeamortized && job.pattern == StreamPattern::kRandomDuplicates) {
      std::lock_guard lock(mu);
      extremes += " " + s.name + "(c=" + std::to_string(r.params.c) + ",g=" + std::to_string(r.params.generation_size) + ")";
    }
  });

  // Exhaustive mode comparison on small instances.
  struct Small {
    std::uint64_t n;
    Slack m;
    double epsilon;
    std::uint64_t universe;
  };
  std::vector<Small> smalls;
  for (std::uint64_t u : {499, 500})
    for (std::uint64_t n : {1, 2, 3, 5, 8, 13, 21, 34, 50})
      for (double e : {0.5, 0.25, 0.125, 1.0 / 16})
        for (Slack m : {Slack::elements(1), Slack::elements(2), Slack::elements(n), Slack::infinite()}) {
          if (static_cast<double>(n) < e * static_cast<double>(u)) smalls.push_back({n, m, e, u});
        }
  std::atomic<std::uint64_t> mismatches{0}, compared{0};
  parallel_for(smalls.size(), [&](std::size_t i) {
    const Small& s = smalls[i];
    const FilterParams params = derive(s.n, s.m, s.epsilon, s.universe);
    SlidingFilter amortized(params, 900 + i, Mode::kAmortized);
    SlidingFilter deamortized(params, 900 + i, Mode::kDeamortized);
    std::mt19937_64 rng(900 + i);
    const std::uint64_t pool = std::min<std::uint64_t>(s.universe, 3 * s.n + 10);
    const std::uint64_t steps = 6 * (s.n + (s.m.is_infinite() ? s.n : s.m.value())) + 60;
    std::uint64_t local_mismatch = 0;
    for (std::uint64_t t = 0; t < steps; ++t) {
      const std::uint64_t x = rng() % pool;
      amortized.insert(x);
      deamortized.insert(x);
      for (std::uint64_t q = 0; q < s.universe; ++q) {
        if (amortized.query(q) != deamortized.query(q)) ++local_mismatch;
      }
    }
    mismatches += local_mismatch;
    compared += steps * s.universe;
  });

  Outcome out;
  out.pass = stress_failures == 0 && mismatches == 0;
  out.detail = "stress_runs=" + std::to_string(jobs.size()) + "x1e6 steps" + extremes +
               " label_violations=" + std::to_string(label_violations.load()) +
               " false_negatives=" + std::to_string(false_negatives.load()) +
               " mode_instances=" + std::to_string(smalls.size()) + " answers_compared=" +
               std::to_string(compared.load()) + " mismatches=" + std::to_string(mismatches.load());
  return out;
}

// ---------------------------------------------------------------------------

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p);
}

std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t p) {
  std::uint64_t r = 1;
  for (; e; e >>= 1, b = mul_mod(b, b, p)) {
    if (e & 1) r = mul_mod(r, b, p);
  }
  return r;
}

Outcome ac7_hash_family() {
  std::vector<std::uint64_t> primes;
  for (std::uint64_t p = 2; p <= 10000; ++p) {
    if (is_prime(p)) primes.push_back(p);
  }

  // Universality. The colliding multipliers for (x, y), x != 0, are a = v / x
  // where v ranges over [1, p) with v mod R == (v r mod p) mod R, r = y / x;
  // so the count depends on r alone. x = 0 collides with every y on the
  // floor((p-1)/R) multipliers putting a y in bin 0.
  std::atomic<std::uint64_t> violations{0}, cross_mismatch{0}, pairs{0};
  std::vector<std::uint64_t> small_primes;
  for (std::uint64_t p : primes) {
    if (p <= 1000) small_primes.push_back(p);
  }
  parallel_for(small_primes.size(), [&](std::size_t i) {
    const std::uint64_t p = small_primes[i];
    std::vector<std::uint64_t> ranges = {2, 3, 5, 7, 10, 16, p / 3, p / 2, p - 1, p};
    std::sort(ranges.begin(), ranges.end());
    ranges.erase(std::unique(ranges.begin(), ranges.end()), ranges.end());
    for (std::uint64_t R : ranges) {
      if (R < 1 || R > p) continue;
      const double limit = 2.0 / static_cast<double>(R);
      std::vector<std::uint64_t> by_ratio(p, 0);
      for (std::uint64_t r = 2; r < p; ++r) {
        std::uint64_t count = 0;
        for (std::uint64_t v = 1; v < p; ++v) {
          if (v % R == mul_mod(v, r, p) % R) ++count;
        }
        by_ratio[r] = count;
        if (static_cast<double>(count) / static_cast<double>(p - 1) > limit + 1e-12) ++violations;
      }
      const std::uint64_t zero_count = (p - 1) / R;
      if (static_cast<double>(zero_count) / static_cast<double>(p - 1) > limit + 1e-12) ++violations;
      pairs += p * (p - 1) / 2;
      // Brute-force cross-check of the reduction on small primes.
      if (p <= 61) {
        for (std::uint64_t x = 0; x < p; ++x) {
          for (std::uint64_t y = x + 1; y < p; ++y) {
            const std::uint64_t expect =
                x == 0 ? zero_count : by_ratio[mul_mod(y, pow_mod(x, p - 2, p), p)];
            const double direct = collision_fraction(p, R, x, y);
            if (std::abs(direct - static_cast<double>(expect) / static_cast<double>(p - 1)) > 1e-12) ++cross_mismatch;
          }
        }
      }
    }
  });

  // Bin balance at u = p.
  std::atomic<std::uint64_t> unbalanced{0}, tables{0};
  parallel_for(primes.size(), [&](std::size_t i) {
    const std::uint64_t p = primes[i];
    std::mt19937_64 rng(p);
    for (std::uint64_t R : {std::uint64_t{2}, std::uint64_t{7}, std::max<std::uint64_t>(1, p / 10), p}) {
      for (int k = 0; k < 2; ++k) {
        if (R > p) continue;
        const std::uint64_t a = p == 2 ? 1 : 1 + rng() % (p - 1);
        const UniversalHash h(p, a, R);
        std::vector<std::uint64_t> sizes(R, 0);
        for (std::uint64_t x = 0; x < p; ++x) ++sizes[h(x)];
        const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
        if (*lo != p / R || *hi != (p + R - 1) / R) ++unbalanced;
        ++tables;
      }
    }
  });

  Outcome out;
  out.pass = violations == 0 && cross_mismatch == 0 && unbalanced == 0;
  out.detail = "universality primes<=1000 pairs=" + std::to_string(pairs.load()) +
               " violations=" + std::to_string(violations.load()) +
               " brute_force_mismatch=" + std::to_string(cross_mismatch.load()) +
               " balance_tables=" + std::to_string(tables.load()) + " (p<=10^4) unbalanced=" +
               std::to_string(unbalanced.load());
  return out;
}

// ---------------------------------------------------------------------------

Outcome ac8_determinism() {
  std::uint64_t problems = 0;
  std::uint64_t checks = 0;
  for (Mode mode : {Mode::kDeamortized, Mode::kAmortized}) {
    for (std::uint64_t n : {10, 1000}) {
      const FilterParams params = derive(n, Slack::elements(n / 2 + 1), 1.0 / 256);
      SlidingFilter a(params, 17, mode), b(params, 17, mode);
      StreamGenerator sa(StreamPattern::kRandomDuplicates, n, params.universe, 5);
      StreamGenerator sb(StreamPattern::kRandomDuplicates, n, params.universe, 5);
      std::vector<std::uint8_t> mid;
      std::mt19937_64 probe_rng(3);
      for (std::uint64_t t = 0; t < 20 * n; ++t) {
        const std::uint64_t x = sa.next();
        if (x != sb.next()) ++problems;
        a.insert(x);
        b.insert(x);
        const std::uint64_t q = probe_rng() % params.universe;
        if (a.query(x) != b.query(x) || a.query(q) != b.query(q)) ++problems;
        ++checks;
        if (t == 10 * n + 3) mid = a.snapshot();
      }
      if (a.snapshot() != b.snapshot()) ++problems;

      // Restore mid-stream and replay the tail.
      SlidingFilter restored = SlidingFilter::restore(mid);
      if (restored.snapshot() != mid) ++problems;
      SlidingFilter replay(params, 17, mode);
      StreamGenerator sr(StreamPattern::kRandomDuplicates, n, params.universe, 5);
      for (std::uint64_t t = 0; t < 20 * n; ++t) {
        const std::uint64_t x = sr.next();
        replay.insert(x);
        if (t > 10 * n + 3) {
          restored.insert(x);
          if (restored.query(x) != replay.query(x)) ++problems;
          ++checks;
        }
      }
      if (restored.snapshot() != replay.snapshot() || restored.snapshot() != a.snapshot()) ++problems;

      std::stringstream stream;
      a.save(stream);
      if (SlidingFilter::load(stream).snapshot() != a.snapshot()) ++problems;
    }
  }
  const auto fpr_a = to_json(measure_fpr(500, Slack::elements(500), 1.0 / 64, 2000, 20000, 8)).dump();
  const auto fpr_b = to_json(measure_fpr(500, Slack::elements(500), 1.0 / 64, 2000, 20000, 8)).dump();
  if (fpr_a != fpr_b) ++problems;
  const auto st_a = to_json(stress_label_safety(50, Slack::elements(5), 0.1, 5000, 4)).dump();
  const auto st_b = to_json(stress_label_safety(50, Slack::elements(5), 0.1, 5000, 4)).dump();
  if (st_a != st_b) ++problems;

  Outcome out;
  out.pass = problems == 0;
  out.detail = "checks=" + std::to_string(checks) + " problems=" + std::to_string(problems);
  return out;
}

}  // namespace

// Optional arguments select criteria by id, e.g. `acceptance AC5 AC7`.
int main(int argc, char** argv) {
  struct Criterion {
    const char* id;
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"AC1", "no false negatives", ac1_no_false_negatives},
      {"AC2", "false-positive rate within eps + 3 sigma", ac2_fpr},
      {"AC3", "exhaustive false-positive census", ac3_census},
      {"AC4", "constant work per operation", ac4_constant_work},
      {"AC5", "space ratio to the lower bound", ac5_space},
      {"AC6", "label-reuse safety and mode equivalence", ac6_labels_and_modes},
      {"AC7", "hash family universality and balance", ac7_hash_family},
      {"AC8", "determinism and serialization", ac8_determinism},
  };
  int failed = 0;
  const std::vector<std::string> selected(argv + 1, argv + argc);
  for (const Criterion& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    const auto start = Clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    std::printf("[%s] %s %s: %s (%.1fs)\n", out.pass ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(), secs);
    std::fflush(stdout);
    if (!out.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
