#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "perc3d/confidence.hpp"
#include "perc3d/errors.hpp"
#include "perc3d/events.hpp"
#include "perc3d/exact.hpp"
#include "perc3d/lattice.hpp"
#include "perc3d/rng.hpp"

namespace perc3d {

inline std::string generator_identity() {
  return std::string(kGeneratorId) + "/" + std::string(kGeneratorVersion);
}

// Record files:
//   #CONFIG {json}           first line: the config, generator and digest
//   {json}                   one trial per line: seed, event, runtime_ms,
//                            digest, witness
//   #SUMMARY {json}          finalization marker: digest, trials, successes
// Lines are appended in completion order; readers sort by seed.
inline constexpr std::string_view kConfigPrefix = "#CONFIG ";
inline constexpr std::string_view kSummaryPrefix = "#SUMMARY ";

struct ExperimentConfig {
  Direction mode = Direction::lower;
  PercolationKind kind = PercolationKind::bond;
  int scale = 0;  // L for lower mode, s for upper mode
  std::string p_text;
  std::size_t trials = 0;
  std::uint64_t base_seed = 0;
  std::string alpha_text = "0.999999";
  std::filesystem::path output;
  std::string generator = generator_identity();

  Rational p() const { return parse_rational(p_text); }
  double p_double() const { return to_double(p()); }
  Rational alpha() const { return parse_rational(alpha_text); }
  std::uint64_t last_seed() const { return base_seed + trials - 1; }

  // Every field that determines trial outcomes, in a fixed order. The output
  // path is excluded so result files can be moved.
  std::string canonical_text() const {
    std::ostringstream out;
    out << "mode=" << to_string(mode) << "\n"
        << "kind=" << to_string(kind) << "\n"
        << "scale=" << scale << "\n"
        << "p=" << p_text << "\n"
        << "trials=" << trials << "\n"
        << "base_seed=" << base_seed << "\n"
        << "alpha=" << alpha_text << "\n"
        << "generator=" << generator << "\n";
    return out.str();
  }

  std::string digest() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : canonical_text()) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    std::ostringstream out;
    out << std::hex;
    out.width(16);
    out.fill('0');
    out << h;
    return out.str();
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["mode"] = std::string(to_string(mode));
    j["kind"] = std::string(to_string(kind));
    j["scale"] = scale;
    j["p"] = p_text;
    j["trials"] = trials;
    j["base_seed"] = base_seed;
    j["alpha"] = alpha_text;
    j["generator"] = generator;
    j["digest"] = digest();
    return j;
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_unsigned(const std::string& key, const std::string& value) {
  if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigError("'" + key + "' must be a non-negative integer, got '" + value + "'");
  }
  try {
    return static_cast<T>(std::stoull(value));
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' is out of range");
  }
}

inline void validate_config(const ExperimentConfig& cfg) {
  const Rational p = cfg.p();
  if (p < 0 || p > 1) throw ConfigError("p must lie in [0, 1]");
  const Rational alpha = cfg.alpha();
  if (alpha <= 0 || alpha >= 1) throw ConfigError("alpha must lie strictly in (0, 1)");
  if (cfg.trials == 0) throw ConfigError("trials must be positive");
  if (cfg.base_seed + (cfg.trials - 1) < cfg.base_seed) {
    throw ConfigError("seed range overflows 64 bits");
  }
  if (cfg.generator != generator_identity()) {
    throw ConfigError("generator '" + cfg.generator + "' is not available; this build provides '" +
                      generator_identity() + "'");
  }
  if (cfg.mode == Direction::lower) {
    (void)make_block_geometry(cfg.scale, cfg.kind);
  } else {
    (void)make_rect_geometry(cfg.scale, cfg.kind);
  }
}

}  // namespace detail

// Flat key=value text. Blank lines and lines starting with '#' are ignored;
// unknown or repeated keys are errors.
inline ExperimentConfig parse_config(std::string_view text) {
  static const std::set<std::string> required = {"mode", "kind",      "scale", "p",
                                                 "trials", "base_seed", "output"};
  static const std::set<std::string> optional = {"alpha", "generator"};
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string value = detail::trim(t.substr(eq + 1));
    if (!required.count(key) && !optional.count(key)) {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (!kv.emplace(key, value).second) {
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }
  for (const auto& key : required) {
    if (!kv.count(key)) throw ConfigError("missing key '" + key + "'");
  }
  ExperimentConfig cfg;
  try {
    cfg.mode = parse_direction(kv["mode"]);
    cfg.kind = parse_kind(kv["kind"]);
    cfg.p_text = kv["p"];
    (void)cfg.p();
    if (kv.count("alpha")) cfg.alpha_text = kv["alpha"];
    (void)cfg.alpha();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  cfg.scale = detail::parse_unsigned<int>("scale", kv["scale"]);
  cfg.trials = detail::parse_unsigned<std::size_t>("trials", kv["trials"]);
  cfg.base_seed = detail::parse_unsigned<std::uint64_t>("base_seed", kv["base_seed"]);
  cfg.output = kv["output"];
  if (kv.count("generator")) cfg.generator = kv["generator"];
  detail::validate_config(cfg);
  return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  ExperimentConfig cfg = parse_config(text.str());
  if (cfg.output.is_relative()) cfg.output = path.parent_path() / cfg.output;
  return cfg;
}

struct TrialRecord {
  std::uint64_t seed = 0;
  bool event = false;
  double runtime_ms = 0.0;
  std::string digest;
  std::string witness;

  std::string to_line() const {
    nlohmann::ordered_json j;
    j["seed"] = seed;
    j["event"] = event;
    j["runtime_ms"] = runtime_ms;
    j["digest"] = digest;
    j["witness"] = witness;
    return j.dump();
  }

  static TrialRecord from_line(const std::string& line) {
    const auto j = nlohmann::json::parse(line);
    TrialRecord r;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.event = j.at("event").get<bool>();
    r.runtime_ms = j.at("runtime_ms").get<double>();
    r.digest = j.at("digest").get<std::string>();
    r.witness = j.value("witness", std::string{});
    return r;
  }

  // Equality ignoring the runtime field.
  bool same_outcome(const TrialRecord& o) const {
    return seed == o.seed && event == o.event && digest == o.digest && witness == o.witness;
  }
};

namespace detail {

inline std::string coord_text(const Coord& c) {
  return "(" + std::to_string(c[0]) + "," + std::to_string(c[1]) + "," + std::to_string(c[2]) +
         ")";
}

}  // namespace detail

// One trial, all randomness drawn from its own seed.
inline TrialRecord run_trial(const ExperimentConfig& cfg, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  TrialRecord rec;
  rec.seed = seed;
  rec.digest = cfg.digest();
  const double p = cfg.p_double();
  if (cfg.mode == Direction::lower) {
    const BlockGeometry g = make_block_geometry(cfg.scale, cfg.kind);
    const OccupancySample sample = sample_block(g, p, seed);
    const auto res = lower_event(sample, g);
    rec.event = res.holds;
    if (res.witness) {
      const BoxShape shape = g.shape();
      rec.witness = "centre=" + detail::coord_text(shape.coord(res.witness->centre)) +
                    " ends=" + detail::coord_text(shape.coord(res.witness->arm_a.back())) +
                    detail::coord_text(shape.coord(res.witness->arm_b.back()));
    }
  } else {
    const RectGeometry r = make_rect_geometry(cfg.scale, cfg.kind);
    const OccupancySample sample = sample_rect(r, p, seed);
    const auto res = upper_event(sample, r);
    rec.event = res.holds;
    if (res.witness) {
      const BoxShape shape = r.shape();
      rec.witness = "u=" + detail::coord_text(shape.coord(res.witness->label_u)) + "#" +
                    std::to_string(res.witness->size_u) +
                    " v=" + detail::coord_text(shape.coord(res.witness->label_v)) + "#" +
                    std::to_string(res.witness->size_v);
    }
  }
  rec.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

struct RecordFile {
  nlohmann::json config;
  std::vector<TrialRecord> records;  // sorted by seed
  std::optional<nlohmann::json> summary;
  // Byte length of the well-formed prefix (drops a torn final line).
  std::uintmax_t valid_bytes = 0;
};

inline RecordFile read_record_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read record file " + path.string());
  RecordFile f;
  std::string line;
  bool have_config = false;
  std::uintmax_t offset = 0;
  while (std::getline(in, line)) {
    const bool complete = !in.eof();
    if (!complete) break;  // torn write
    offset += line.size() + 1;
    if (line.empty()) {
      f.valid_bytes = offset;
      continue;
    }
    try {
      if (line.rfind(kConfigPrefix, 0) == 0) {
        if (have_config) throw TamperError("duplicate #CONFIG line in " + path.string());
        f.config = nlohmann::json::parse(line.substr(kConfigPrefix.size()));
        have_config = true;
      } else if (line.rfind(kSummaryPrefix, 0) == 0) {
        if (f.summary) throw TamperError("duplicate #SUMMARY line in " + path.string());
        f.summary = nlohmann::json::parse(line.substr(kSummaryPrefix.size()));
      } else {
        if (!have_config) throw TamperError("record before #CONFIG in " + path.string());
        if (f.summary) throw TamperError("record after #SUMMARY in " + path.string());
        f.records.push_back(TrialRecord::from_line(line));
      }
    } catch (const nlohmann::json::exception& e) {
      throw TamperError("malformed line in " + path.string() + ": " + e.what());
    }
    f.valid_bytes = offset;
  }
  if (!have_config) throw TamperError("missing #CONFIG line in " + path.string());
  std::sort(f.records.begin(), f.records.end(),
            [](const auto& a, const auto& b) { return a.seed < b.seed; });
  return f;
}

// Seed ranges used by earlier runs, one line per run:
//   first=<seed> last=<seed> status=<final|pilot> digest=<hex> mode=<..> kind=<..>
// Any overlap between two ranges where either side is final is refused, except
// a rerun of the identical config (resume).
class SeedLedger {
 public:
  struct Entry {
    std::uint64_t first = 0;
    std::uint64_t last = 0;
    bool final_run = false;
    std::string digest;
    std::string mode;
    std::string kind;
  };

  explicit SeedLedger(std::filesystem::path path) : path_(std::move(path)) {
    std::ifstream in(path_);
    std::string line;
    while (std::getline(in, line)) {
      if (detail::trim(line).empty() || line.front() == '#') continue;
      std::istringstream fields(line);
      std::string token;
      Entry e;
      while (fields >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) throw IoError("malformed seed ledger line: " + line);
        const std::string k = token.substr(0, eq);
        const std::string v = token.substr(eq + 1);
        if (k == "first") e.first = std::stoull(v);
        else if (k == "last") e.last = std::stoull(v);
        else if (k == "status") e.final_run = v == "final";
        else if (k == "digest") e.digest = v;
        else if (k == "mode") e.mode = v;
        else if (k == "kind") e.kind = v;
      }
      entries_.push_back(e);
    }
  }

  const std::vector<Entry>& entries() const { return entries_; }

  // Throws SeedReuseError on a conflicting overlap; returns true if the same
  // config is already recorded.
  bool check(const ExperimentConfig& cfg, bool final_run) const {
    bool known = false;
    for (const auto& e : entries_) {
      if (e.digest == cfg.digest()) {
        known = true;
        continue;
      }
      const bool overlap = !(cfg.last_seed() < e.first || e.last < cfg.base_seed);
      if (overlap && (e.final_run || final_run)) {
        throw SeedReuseError("seeds " + std::to_string(cfg.base_seed) + ".." +
                             std::to_string(cfg.last_seed()) + " overlap the " +
                             (e.final_run ? "final" : "pilot") + " range " +
                             std::to_string(e.first) + ".." + std::to_string(e.last));
      }
    }
    return known;
  }

  void record(const ExperimentConfig& cfg, bool final_run) {
    std::ofstream out(path_, std::ios::app);
    if (!out) throw IoError("cannot write seed ledger " + path_.string());
    out << "first=" << cfg.base_seed << " last=" << cfg.last_seed()
        << " status=" << (final_run ? "final" : "pilot") << " digest=" << cfg.digest()
        << " mode=" << to_string(cfg.mode) << " kind=" << to_string(cfg.kind) << "\n";
    entries_.push_back({cfg.base_seed, cfg.last_seed(), final_run, cfg.digest(),
                        std::string(to_string(cfg.mode)), std::string(to_string(cfg.kind))});
  }

 private:
  std::filesystem::path path_;
  std::vector<Entry> entries_;
};

struct RunOptions {
  int workers = 0;  // 0: PERC3D_WORKERS or hardware concurrency
  std::optional<std::filesystem::path> ledger;  // default: seeds.ledger beside the output
  bool final_run = false;
};

struct RunResult {
  std::vector<TrialRecord> records;  // sorted by seed
  std::size_t successes = 0;
  std::size_t resumed = 0;  // records already present before this call
};

inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PERC3D_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs base_seed .. base_seed+trials-1, appending each record as it finishes
// and a #SUMMARY line at the end. Rerunning an interrupted output file skips
// the seeds already persisted.
inline RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {}) {
  detail::validate_config(cfg);
  (void)plan(cfg.mode, cfg.trials, cfg.alpha());

  const auto ledger_path =
      opts.ledger.value_or(cfg.output.parent_path() / "seeds.ledger");
  SeedLedger ledger(ledger_path);
  const bool known = ledger.check(cfg, opts.final_run);

  RunResult result;
  std::set<std::uint64_t> done;
  const bool exists = std::filesystem::exists(cfg.output);
  if (exists) {
    const RecordFile f = read_record_file(cfg.output);
    if (f.config.value("digest", std::string{}) != cfg.digest()) {
      throw TamperError("existing output " + cfg.output.string() +
                        " was produced by a different configuration");
    }
    for (const auto& r : f.records) {
      if (r.digest != cfg.digest()) throw TamperError("record digest mismatch in output");
      if (r.seed < cfg.base_seed || r.seed > cfg.last_seed() || !done.insert(r.seed).second) {
        throw TamperError("unexpected or duplicate seed " + std::to_string(r.seed));
      }
    }
    result.records = f.records;
    result.resumed = f.records.size();
    if (f.summary) {
      for (const auto& r : result.records) result.successes += r.event ? 1 : 0;
      return result;
    }
    std::filesystem::resize_file(cfg.output, f.valid_bytes);
  }

  std::ofstream out(cfg.output, std::ios::app | std::ios::binary);
  if (!out) throw IoError("cannot open output file " + cfg.output.string());
  if (!exists) {
    out << kConfigPrefix << cfg.to_json().dump() << "\n";
    out.flush();
    if (!out) throw IoError("cannot write output file " + cfg.output.string());
  }
  if (!known) ledger.record(cfg, opts.final_run);

  std::vector<std::uint64_t> pending;
  for (std::uint64_t i = 0; i < cfg.trials; ++i) {
    if (!done.count(cfg.base_seed + i)) pending.push_back(cfg.base_seed + i);
  }

  std::mutex writer;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  auto work = [&] {
    try {
      for (std::size_t i = next++; i < pending.size(); i = next++) {
        TrialRecord rec = run_trial(cfg, pending[i]);
        const std::string line = rec.to_line();
        std::lock_guard lock(writer);
        out << line << "\n";
        out.flush();
        result.records.push_back(std::move(rec));
      }
    } catch (...) {
      std::lock_guard lock(writer);
      if (!failure) failure = std::current_exception();
      next = pending.size();
    }
  };
  const int workers = std::max(1, std::min<int>(resolve_workers(opts.workers),
                                                static_cast<int>(pending.size())));
  std::vector<std::thread> threads;
  for (int i = 1; i < workers; ++i) threads.emplace_back(work);
  work();
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);

  std::sort(result.records.begin(), result.records.end(),
            [](const auto& a, const auto& b) { return a.seed < b.seed; });
  for (const auto& r : result.records) result.successes += r.event ? 1 : 0;

  nlohmann::ordered_json summary;
  summary["digest"] = cfg.digest();
  summary["trials"] = cfg.trials;
  summary["successes"] = result.successes;
  out << kSummaryPrefix << summary.dump() << "\n";
  out.flush();
  if (!out) throw IoError("failed to finalize " + cfg.output.string());
  return result;
}

// A complete, verified record file reduced to what the verdict needs.
struct LoadedRun {
  ExperimentConfig config;
  std::vector<TrialRecord> records;
  std::size_t successes = 0;

  // Lower: seeds whose block was open. Upper: seeds whose event failed.
  std::vector<std::uint64_t> bad_seeds() const {
    std::vector<std::uint64_t> out;
    for (const auto& r : records) {
      if (r.event == (config.mode == Direction::lower)) out.push_back(r.seed);
    }
    return out;
  }
};

inline LoadedRun load_run(const std::filesystem::path& path) {
  const RecordFile f = read_record_file(path);
  if (!f.summary) throw IncompleteRun(path.string() + " has no #SUMMARY line");
  LoadedRun run;
  try {
    const auto& c = f.config;
    run.config.mode = parse_direction(c.at("mode").get<std::string>());
    run.config.kind = parse_kind(c.at("kind").get<std::string>());
    run.config.scale = c.at("scale").get<int>();
    run.config.p_text = c.at("p").get<std::string>();
    run.config.trials = c.at("trials").get<std::size_t>();
    run.config.base_seed = c.at("base_seed").get<std::uint64_t>();
    run.config.alpha_text = c.at("alpha").get<std::string>();
    run.config.generator = c.at("generator").get<std::string>();
    run.config.output = path;
    if (run.config.digest() != c.at("digest").get<std::string>()) {
      throw TamperError("#CONFIG digest does not match its fields in " + path.string());
    }
  } catch (const nlohmann::json::exception& e) {
    throw TamperError("malformed #CONFIG in " + path.string() + ": " + e.what());
  }
  const std::string digest = run.config.digest();
  std::set<std::uint64_t> seen;
  for (const auto& r : f.records) {
    if (r.digest != digest) throw TamperError("record digest mismatch in " + path.string());
    if (r.seed < run.config.base_seed || r.seed > run.config.last_seed() ||
        !seen.insert(r.seed).second) {
      throw TamperError("unexpected or duplicate seed " + std::to_string(r.seed) + " in " +
                        path.string());
    }
    run.successes += r.event ? 1 : 0;
  }
  if (seen.size() != run.config.trials) {
    throw IncompleteRun(path.string() + " has " + std::to_string(seen.size()) + " of " +
                        std::to_string(run.config.trials) + " records");
  }
  try {
    if (f.summary->at("digest").get<std::string>() != digest ||
        f.summary->at("trials").get<std::size_t>() != run.config.trials ||
        f.summary->at("successes").get<std::size_t>() != run.successes) {
      throw TamperError("#SUMMARY does not match the records in " + path.string());
    }
  } catch (const nlohmann::json::exception& e) {
    throw TamperError("malformed #SUMMARY in " + path.string() + ": " + e.what());
  }
  run.records = f.records;
  return run;
}

struct Report {
  Verdict verdict;
  LoadedRun lower;
  LoadedRun upper;
  std::string text;
};

inline std::string render_seeds(const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(seeds[i]);
  }
  return out;
}

inline Report report(const std::filesystem::path& lower_path,
                     const std::filesystem::path& upper_path,
                     std::optional<Rational> alpha = std::nullopt) {
  Report rep;
  rep.lower = load_run(lower_path);
  rep.upper = load_run(upper_path);
  if (rep.lower.config.mode != Direction::lower) {
    throw ContractError(lower_path.string() + " is not a lower-bound run");
  }
  if (rep.upper.config.mode != Direction::upper) {
    throw ContractError(upper_path.string() + " is not an upper-bound run");
  }
  if (rep.lower.config.kind != rep.upper.config.kind) {
    throw ContractError("lower and upper runs use different percolation kinds");
  }
  const Rational a = alpha.value_or(rep.lower.config.alpha());
  if (!alpha && rep.upper.config.alpha() != a) {
    throw ContractError("lower and upper runs were planned at different confidence levels");
  }
  rep.verdict = verdict({rep.lower.config.p(), rep.lower.config.trials, rep.lower.successes},
                        {rep.upper.config.p(), rep.upper.config.trials, rep.upper.successes}, a);
  const Verdict& v = rep.verdict;

  std::ostringstream out;
  out << "kind: " << to_string(rep.lower.config.kind) << "\n";
  out << "interval: [" << format_exact(v.p_lo) << ", " << format_exact(v.p_hi) << "]\n";
  out << "confidence: " << format_exact(v.alpha * 100) << "%\n";
  out << "status: " << (v.certified() ? "certified" : "NOT certified") << "\n";
  for (const auto& w : v.warnings) out << "warning: " << w << "\n";
  for (const auto* side : {&rep.lower, &rep.upper}) {
    const bool lower = side->config.mode == Direction::lower;
    const ConfidencePlan& pl = lower ? v.lower_plan : v.upper_plan;
    const CertificationConstant& c = default_p0(side->config.mode);
    out << "\n[" << to_string(side->config.mode) << "]\n";
    out << "p: " << side->config.p_text << "  scale: " << side->config.scale
        << "  trials: " << side->config.trials << "  base_seed: " << side->config.base_seed
        << "\n";
    out << "successes: " << side->successes << "  threshold m: " << pl.m << "  certified: "
        << ((lower ? v.lower_certified : v.upper_certified) ? "yes" : "no") << "\n";
    out << "p0: " << c.value_text << "  (" << c.citation << ")\n";
    out << "tail: " << format_scientific(pl.tail, 7) << "  exact: " << pl.tail << "\n";
    out << "bad seeds: " << render_seeds(side->bad_seeds()) << "\n";
    out << "generator: " << side->config.generator << "\n";
  }
  rep.text = out.str();
  return rep;
}

}  // namespace perc3d
