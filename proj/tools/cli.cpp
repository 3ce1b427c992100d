#include "cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "slbf/error.hpp"
#include "slbf/filter.hpp"
#include "slbf/harness.hpp"
#include "slbf/params.hpp"

namespace slbf::cli {

namespace {

struct Config {
  std::uint64_t n = 0;
  std::string slack = "inf";
  double epsilon = 0.01;
  std::uint64_t seed = 1;
  std::string format = "tsv";
  // dedup
  std::string input = "-";
  std::string input_format = "text";
  bool quiet = false;
  // fpr
  std::uint64_t trials = 100000;
  std::uint64_t stream_len = 0;
  // bench
  std::uint64_t inserts = 1000000;
  std::string pattern = "distinct";
};

void add_common(CLI::App* sub, Config& cfg, bool slack_default_inf) {
  sub->add_option("-n,--window", cfg.n, "Window size n")->required()->check(CLI::PositiveNumber);
  auto* slack = sub->add_option("-m,--slack", cfg.slack, "Slackness m, or 'inf'");
  if (!slack_default_inf) slack->required();
  sub->add_option("-e,--epsilon", cfg.epsilon, "False-positive bound in (0, 1)")->capture_default_str();
  sub->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"tsv", "json"}))->capture_default_str();
}

FilterParams params_of(const Config& cfg) { return derive(cfg.n, Slack::parse(cfg.slack), cfg.epsilon); }

// Flattened "key<TAB>value" lines, keys joined with '.'.
void write_report(const nlohmann::json& report, const std::string& format, std::ostream& out) {
  if (format == "json") {
    out << report.dump(2) << '\n';
    return;
  }
  const nlohmann::json flat = report.flatten();
  for (const auto& [key, value] : flat.items()) {
    std::string name = key.substr(1);
    for (char& ch : name) {
      if (ch == '/') ch = '.';
    }
    out << name << '\t' << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
  }
}

int run_dedup(const Config& cfg, std::istream& stdin_stream, std::ostream& out, std::ostream& err) {
  const FilterParams params = params_of(cfg);
  SlidingFilter filter(params, cfg.seed);

  std::unique_ptr<std::ifstream> file;
  std::istream* in = &stdin_stream;
  if (cfg.input != "-") {
    file = std::make_unique<std::ifstream>(cfg.input, std::ios::binary);
    if (!*file) {
      err << "slbf: cannot open input '" << cfg.input << "'\n";
      return kUsage;
    }
    in = file.get();
  }

  const bool json = cfg.format == "json";
  std::uint64_t items = 0;
  std::uint64_t duplicates = 0;
  auto handle = [&](std::uint64_t key, const std::string& shown) {
    const std::uint64_t x = key % params.universe;
    const bool seen = filter.query(x);
    filter.insert(x);
    if (seen) ++duplicates;
    if (!cfg.quiet) {
      if (json) {
        out << nlohmann::json{{"index", items}, {"token", shown}, {"duplicate", seen}}.dump() << '\n';
      } else {
        out << items << '\t' << shown << '\t' << (seen ? "yes" : "no") << '\n';
      }
    }
    ++items;
  };

  try {
    if (cfg.input_format == "text") {
      std::string token;
      while (*in >> token) handle(token_hash(token), token);
    } else {
      unsigned char buf[8];
      while (in->read(reinterpret_cast<char*>(buf), sizeof buf)) {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t{buf[i]} << (8 * i);
        handle(v, std::to_string(v));
      }
      if (in->gcount() != 0) {
        err << "slbf: binary input length is not a multiple of 8 bytes\n";
        return kUsage;
      }
    }
  } catch (const InsertOverflow& e) {
    err << "slbf: insert overflow after " << items << " items: " << e.what() << '\n';
    return kOverflow;
  }

  const SpaceReport space = filter.bits_used();
  if (json) {
    out << nlohmann::json{{"summary",
                           {{"items", items},
                            {"duplicates", duplicates},
                            {"bits_used", space.total_bits()},
                            {"params", to_json(params)}}}}
               .dump()
        << '\n';
  } else {
    out << "# items=" << items << " duplicates=" << duplicates << " bits_used=" << space.total_bits()
        << " c=" << params.c << " g=" << params.generation_size << " R=" << params.fp_range << '\n';
  }
  return kOk;
}

int run_fpr(const Config& cfg, std::ostream& out, std::ostream& err) {
  const Slack slack = Slack::parse(cfg.slack);
  std::uint64_t stream_len = cfg.stream_len;
  if (stream_len == 0) stream_len = 2 * (cfg.n + (slack.is_infinite() ? 0 : slack.value()));
  const FprReport report = measure_fpr(cfg.n, slack, cfg.epsilon, stream_len, cfg.trials, cfg.seed);
  write_report(to_json(report), cfg.format, out);
  if (report.underpowered) {
    err << "slbf: warning: epsilon * trials = " << cfg.epsilon * static_cast<double>(cfg.trials)
        << " < 20; the 3-sigma check has little power\n";
    return kUnderpowered;
  }
  return kOk;
}

int run_space(const Config& cfg, std::ostream& out) {
  write_report(to_json(space_report(cfg.n, Slack::parse(cfg.slack), cfg.epsilon, cfg.seed)), cfg.format, out);
  return kOk;
}

int run_bench(const Config& cfg, std::ostream& out, std::ostream& err) {
  const FilterParams params = params_of(cfg);
  SlidingFilter filter(params, cfg.seed);
  StreamGenerator stream(parse_stream_pattern(cfg.pattern), cfg.n, params.universe, cfg.seed);
  std::vector<std::uint64_t> elements(cfg.inserts);
  for (auto& x : elements) x = stream.next();

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  try {
    for (std::uint64_t x : elements) filter.insert(x);
  } catch (const InsertOverflow& e) {
    err << "slbf: " << e.what() << '\n';
    return kOverflow;
  }
  const auto mid = clock::now();
  std::uint64_t hits = 0;
  for (std::uint64_t x : elements) hits += filter.query(x) ? 1 : 0;
  const auto end = clock::now();

  const double insert_s = std::chrono::duration<double>(mid - start).count();
  const double query_s = std::chrono::duration<double>(end - mid).count();
  nlohmann::json report = {{"schema", "slbf.bench/1"},
                           {"params", to_json(params)},
                           {"pattern", cfg.pattern},
                           {"inserts", cfg.inserts},
                           {"query_hits", hits},
                           {"inserts_per_sec", insert_s > 0 ? static_cast<double>(cfg.inserts) / insert_s : 0.0},
                           {"queries_per_sec", query_s > 0 ? static_cast<double>(cfg.inserts) / query_s : 0.0},
                           {"cost", to_json(filter.step_cost_stats())}};
  write_report(report, cfg.format, out);
  return kOk;
}

}  // namespace

std::uint64_t token_hash(std::string_view token) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char ch : token) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  return h;
}

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sliding Bloom filter: approximate membership over the last n stream elements", "slbf"};
  app.require_subcommand(1);
  Config cfg;

  auto* dedup = app.add_subcommand("dedup", "Flag elements already seen within the window");
  add_common(dedup, cfg, true);
  dedup->add_option("--input", cfg.input, "Input path, '-' for stdin")->capture_default_str();
  dedup->add_option("--input-format", cfg.input_format, "text (whitespace-separated tokens) or le64")
      ->check(CLI::IsMember({"text", "le64"}))
      ->capture_default_str();
  dedup->add_flag("--quiet", cfg.quiet, "Only print the summary line");

  auto* fpr = app.add_subcommand("fpr", "Measure the false-positive rate past the n + m window");
  add_common(fpr, cfg, false);
  fpr->add_option("--trials", cfg.trials, "Number of probes")->check(CLI::PositiveNumber)->capture_default_str();
  fpr->add_option("--stream-len", cfg.stream_len, "Elements inserted (default 2(n + m))");

  auto* space = app.add_subcommand("space", "Compare the filter's size with the space bounds");
  add_common(space, cfg, false);

  auto* bench = app.add_subcommand("bench", "Throughput and touched-cell statistics");
  add_common(bench, cfg, true);
  bench->add_option("--inserts", cfg.inserts, "Stream length")->capture_default_str();
  bench->add_option("--pattern", cfg.pattern, "Stream pattern")
      ->check(CLI::IsMember({"distinct", "random-duplicates", "all-same", "round-robin", "edge-bursts"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kUsage;
  }

  try {
    if (*dedup) return run_dedup(cfg, in, out, err);
    if (*fpr) return run_fpr(cfg, out, err);
    if (*space) return run_space(cfg, out);
    return run_bench(cfg, out, err);
  } catch (const InvalidParams& e) {
    err << "slbf: invalid parameters: " << e.what() << '\n';
    return kUsage;
  } catch (const InsertOverflow& e) {
    err << "slbf: " << e.what() << '\n';
    return kOverflow;
  }
}

}  // namespace slbf::cli
