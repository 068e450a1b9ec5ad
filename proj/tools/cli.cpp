#include "cli.hpp"

#include "sparse_forge/corners.hpp"
#include "sparse_forge/encode.hpp"
#include "sparse_forge/fastness.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <unistd.h>

#include "CLI11.hpp"

namespace sparse_forge::cli {

namespace fs = std::filesystem;
using nlohmann::json;

void to_json(json& j, const RunConfig& c) {
  j = {{"command", c.command},
       {"rule", c.rule},
       {"regime", std::string(to_string(c.regime))},
       {"precision_ceiling", "2^-" + std::to_string(c.precision_ceiling_bits)},
       {"depth", c.depth},
       {"max_pairs", c.max_pairs},
       {"refine", c.refine},
       {"seed", c.seed},
       {"out", c.out}};
}

void write_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::io_error, "cannot write " + tmp.string());
    f << content;
    if (!f.flush()) throw Error(ErrorCode::io_error, "write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorCode::io_error, "cannot rename onto " + path + ": " + ec.message());
  }
}

namespace {

// Usage problems detected after parsing; reported like CLI11's own errors.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Verdict of a verification command, mapped onto the exit code.
enum class Outcome { pass, counterexample, inconclusive };

int exit_for(Outcome o, std::ostream& err) {
  switch (o) {
    case Outcome::pass: return kPass;
    case Outcome::counterexample: return kCounterexample;
    case Outcome::inconclusive:
      err << "inconclusive: some verdicts are UNKNOWN at the precision ceiling\n";
      return kError;
  }
  return kError;
}

Outcome outcome(bool failed, bool unknown) {
  if (failed) return Outcome::counterexample;
  return unknown ? Outcome::inconclusive : Outcome::pass;
}

template <class F>
CLI::Validator parses_as(F parse, std::string name) {
  return CLI::Validator(
      [parse](std::string& s) -> std::string {
        try {
          parse(s);
        } catch (const std::exception& e) {
          return e.what();
        }
        return {};
      },
      std::move(name));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, sep);)
    if (!item.empty()) out.push_back(item);
  return out;
}

std::pair<int, int> parse_range(const std::string& s) {
  const auto parts = split(s, ':');
  if (parts.size() != 2) throw Error(ErrorCode::parse_error, "expected a:b, got " + s);
  const int a = std::stoi(parts[0]), b = std::stoi(parts[1]);
  if (a > b) throw Error(ErrorCode::parse_error, "empty range " + s);
  return {a, b};
}

std::vector<Rational> parse_rationals(const std::string& s) {
  std::vector<Rational> out;
  for (const auto& p : split(s, ',')) out.push_back(parse_rational(p));
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::io_error, "cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::parse_error, path + ": " + e.what());
  }
}

// Flags shared by several subcommands. Values given on the command line win
// over the configuration file and the environment.
struct Shared {
  std::string config_file;
  std::string rule = "theorem-b";
  std::string regime = "rational";
  std::string precision;
  int depth = 6;
  std::uint64_t max_pairs = 100000;
  int refine = 0;
  std::uint64_t seed = 1;
  std::string out;
  std::string lengths;

  std::map<std::string, std::vector<CLI::Option*>> opts;
  // Default depth per subcommand; the shared variable holds only given values.
  std::map<const CLI::App*, int> default_depth;

  bool given(const std::string& key) const {
    auto it = opts.find(key);
    if (it == opts.end()) return false;
    for (auto* o : it->second)
      if (o->count() > 0) return true;
    return false;
  }
};

void add_shared(CLI::App* sub, Shared& s, int default_depth, bool system_flags = true) {
  auto keep = [&](const std::string& key, CLI::Option* o) { s.opts[key].push_back(o); };
  s.default_depth[sub] = default_depth;
  keep("config", sub->add_option("--config", s.config_file, "key=value configuration file")->check(CLI::ExistingFile));
  keep("precision", sub->add_option("--precision", s.precision, "precision ceiling, e.g. 2^-256")
                        ->check(parses_as([](const std::string& t) { parse_precision_bits(t); }, "PRECISION")));
  keep("seed", sub->add_option("--seed", s.seed, "sampler seed"));
  keep("out", sub->add_option("--out", s.out, "output path"));
  if (!system_flags) return;
  keep("rule", sub->add_option("--rule", s.rule, "theorem-b, middle-thirds or gap-encoded")
                   ->check(parses_as([](const std::string& t) { parse_gap_rule(t); }, "RULE")));
  keep("regime", sub->add_option("--regime", s.regime, "rational or tower")
                     ->check(parses_as([](const std::string& t) { parse_regime(t); }, "REGIME")));
  keep("depth", sub->add_option("--depth", s.depth, "construction depth K (default " + std::to_string(default_depth) + ")")
                    ->check(CLI::NonNegativeNumber));
  keep("lengths", sub->add_option("--lengths", s.lengths, "comma-separated gap lengths for gap-encoded sets")
                      ->check(parses_as([](const std::string& t) { parse_rationals(t); }, "LENGTHS")));
}

RunConfig resolve(const Shared& s, const CLI::App* sub, const std::string& command, const std::string& default_out) {
  RunConfig c;
  c.command = command;
  c.depth = s.default_depth.at(sub);
  if (!s.config_file.empty()) {
    std::vector<std::pair<std::string, std::string>> rest;
    MagnitudeConfig mc;
    try {
      mc = parse_magnitude_config(read_file(s.config_file), &rest);
    } catch (const Error& e) {
      throw UsageError("--config: " + std::string(e.what()));
    }
    c.regime = mc.regime;
    c.precision_ceiling_bits = mc.precision_ceiling_bits;
    for (const auto& [k, v] : rest) {
      try {
        if (k == "rule") {
          parse_gap_rule(v);
          c.rule = v;
        } else if (k == "depth") {
          c.depth = std::stoi(v);
        } else if (k == "max_pairs") {
          c.max_pairs = std::stoull(v);
        } else if (k == "refine") {
          c.refine = std::stoi(v);
        } else if (k == "seed") {
          c.seed = std::stoull(v);
        } else if (k == "out") {
          c.out = v;
        } else {
          throw UsageError("--config: unknown key " + k);
        }
      } catch (const std::logic_error& e) {
        throw UsageError("--config: bad value for " + k + ": " + v);
      }
    }
  }
  if (const char* env = std::getenv("SPARSE_FORGE_PRECISION"); env && *env) {
    try {
      c.precision_ceiling_bits = parse_precision_bits(env);
    } catch (const Error& e) {
      throw UsageError("SPARSE_FORGE_PRECISION: " + std::string(e.what()));
    }
  }
  if (s.given("precision")) c.precision_ceiling_bits = parse_precision_bits(s.precision);
  if (s.given("rule")) c.rule = s.rule;
  if (s.given("regime")) c.regime = parse_regime(s.regime);
  if (s.given("depth")) c.depth = s.depth;
  if (s.given("seed")) c.seed = s.seed;
  if (s.given("max-pairs")) c.max_pairs = s.max_pairs;
  if (s.given("refine")) c.refine = s.refine;
  if (s.given("out")) c.out = s.out;
  if (c.out.empty()) c.out = default_out;
  if (c.depth < 0) throw UsageError("--depth: must be >= 0");
  if (c.max_pairs == 0) throw UsageError("--max-pairs: must be positive");
  if (c.refine < 0) throw UsageError("--refine: must be >= 0");
  if (c.precision_ceiling_bits < 64) throw UsageError("--precision: ceiling must be at most 2^-64");
  return c;
}

CantorSystem make_system(const RunConfig& c, const std::string& lengths, int depth) {
  switch (parse_gap_rule(c.rule)) {
    case GapRule::theorem_b: return CantorSystem::theorem_b(c.regime, depth);
    case GapRule::middle_thirds: return CantorSystem::middle_thirds(depth);
    case GapRule::gap_encoded: return CantorSystem::gap_encoded(parse_rationals(lengths), depth);
  }
  throw Error(ErrorCode::invalid_argument, "unknown rule");
}

json system_json(const CantorSystem& sys) {
  json j = {{"name", sys.name()}, {"rule", std::string(to_string(sys.rule()))}, {"regime", std::string(to_string(sys.regime()))}};
  if (sys.rule() == GapRule::gap_encoded) {
    auto& l = j["lengths"] = json::array();
    for (const auto& q : sys.lengths()) l.push_back(to_pq(q));
  }
  return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// Writes the report and echoes a one-line summary.
void emit(const RunConfig& c, json body, std::ostream& out, const std::string& summary) {
  body["config"] = c;
  write_atomic(c.out, dump(body));
  out << summary << " -> " << c.out << "\n";
}

// A set file: the IntervalSet plus the system and level that produced it.
struct LoadedSet {
  IntervalSet set;
  std::optional<CantorSystem> system;
  int level = -1;
};

LoadedSet load_set(const std::string& path) {
  const json j = read_json(path);
  LoadedSet s;
  try {
    if (j.is_array()) {
      s.set = j.get<IntervalSet>();
      return s;
    }
    s.set = j.at("set").get<IntervalSet>();
    if (j.contains("system") && j.contains("level")) {
      const auto& sj = j.at("system");
      s.level = j.at("level").get<int>();
      const GapRule rule = parse_gap_rule(sj.at("rule").get<std::string>());
      const Regime regime = parse_regime(sj.at("regime").get<std::string>());
      if (rule == GapRule::theorem_b) s.system = CantorSystem::theorem_b(regime, s.level);
      else if (rule == GapRule::middle_thirds) s.system = CantorSystem::middle_thirds(s.level);
      else s.system = CantorSystem::gap_encoded(parse_rationals([&] {
        std::string joined;
        for (const auto& l : sj.at("lengths")) joined += l.get<std::string>() + ",";
        return joined;
      }()), s.level);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, path + ": " + e.what());
  }
  return s;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_build(const RunConfig& c, const std::string& lengths, std::ostream& out) {
  const CantorSystem sys = make_system(c, lengths, c.depth);
  const IntervalSet& e = sys.level_set(c.depth);
  json body = {{"system", system_json(sys)}, {"level", c.depth}, {"components", e.size()}, {"set", e}};
  emit(c, std::move(body), out, "built " + sys.name() + " level " + std::to_string(c.depth) + " with " + std::to_string(e.size()) + " components");
  return kPass;
}

struct DimsArgs {
  std::string in;
  bool radii_from_regime = false;
  std::string radii;
  std::string window;
  std::string csv;
  std::string plot;
  std::string modulus;
};

int cmd_dims(const RunConfig& c, const std::string& lengths, const DimsArgs& a, std::ostream& out) {
  IntervalSet set;
  std::optional<CantorSystem> sys;
  int level = c.depth;
  if (!a.in.empty()) {
    LoadedSet ls = load_set(a.in);
    set = std::move(ls.set);
    sys = ls.system;
    if (ls.level >= 0) level = ls.level;
  } else {
    sys = make_system(c, lengths, c.depth);
    set = sys->level_set(c.depth);
  }

  std::vector<Scalar> radii;
  std::vector<int> index;
  if (!a.radii.empty()) {
    for (const auto& q : parse_rationals(a.radii)) radii.emplace_back(q);
    for (std::size_t i = 0; i < radii.size(); ++i) index.push_back(static_cast<int>(i));
  } else {
    if (!sys || sys->rule() == GapRule::gap_encoded)
      throw UsageError("--radii-from-regime: the set has no scale sequence; pass --radii");
    for (int k = 1; k <= level; ++k) {
      radii.push_back(sys->scale(k));
      index.push_back(k);
    }
  }
  if (!a.window.empty()) {
    const auto [lo, hi] = parse_range(a.window);
    std::vector<Scalar> r;
    std::vector<int> idx;
    for (std::size_t i = 0; i < radii.size(); ++i)
      if (index[i] >= lo && index[i] <= hi) {
        r.push_back(radii[i]);
        idx.push_back(index[i]);
      }
    if (r.empty()) throw UsageError("--window: selects no radii");
    radii = std::move(r);
    index = std::move(idx);
  }

  CoveringProfile profile = covering_profile(set, radii);
  if (!a.modulus.empty()) profile = modulus_pushforward(profile, parse_modulus(a.modulus));
  json body = {{"profile", profile}, {"index", index}};
  body["input"] = {{"path", a.in.empty() ? std::string("(built)") : a.in},
                   {"system", sys ? sys->name() : std::string("unknown")},
                   {"level", level}};
  std::string summary = "profile with " + std::to_string(profile.entries.size()) + " radii";
  if (profile.entries.size() >= 3) {
    try {
      const DimensionEstimate est = box_dim_estimate(profile);
      body["estimate"] = {{"slope", to_pq(est.slope)},
                          {"slope_decimal", to_double(est.slope)},
                          {"log_precision", to_pq(est.log_precision)},
                          {"points", est.points},
                          {"note", "windowed box-counting slope, not a limit"}};
      std::ostringstream s;
      s << ", slope " << to_double(est.slope);
      summary += s.str();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::degenerate) throw;
      body["estimate"] = {{"error", e.what()}};
    }
  }
  if (!a.csv.empty()) write_atomic(a.csv, profile_csv(profile));
  if (!a.plot.empty()) write_atomic(a.plot, profile_plot_csv(profile));
  emit(c, std::move(body), out, summary);
  return kPass;
}

struct VerifyArgs {
  int k = -1;
  std::string form = "differences";
  int n = 2;
  std::string corner = "poly:2";
  std::string delta = "auto";
  bool sampled = false;
  int m = 1;
  std::string k_range = "3:12";
  int j = 0;
  int k_max = 10;
};

int cmd_scale_lemma(const RunConfig& c, const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  if (c.depth < 1) throw UsageError("--depth: must be >= 1");
  const CantorSystem sys = make_system(c, "", c.depth);
  const ScaleForm form = parse_scale_form(a.form);
  std::vector<int> ks;
  if (a.k >= 0) {
    if (a.k >= c.depth) throw UsageError("--k: must be < depth");
    ks.push_back(a.k);
  } else {
    for (int k = 0; k < c.depth; ++k) ks.push_back(k);
  }
  json reports = json::array();
  std::uint64_t verified = 0, violated = 0;
  for (int k : ks) {
    const ScaleLemmaReport r = scale_lemma_check(sys, c.depth, k, form);
    verified += r.verified;
    violated += r.violated;
    reports.push_back(r);
  }
  json body = {{"verified", verified}, {"violated", violated}, {"unknown", 0}, {"passed", violated == 0}, {"reports", reports}};
  emit(c, std::move(body), out,
       "scale lemma on " + sys.name() + ": verified " + std::to_string(verified) + ", violated " + std::to_string(violated));
  return exit_for(outcome(violated > 0, false), err);
}

int cmd_containment(const RunConfig& c, const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  if (c.depth < 1) throw UsageError("--depth: must be >= 1");
  const CantorSystem sys = make_system(c, "", c.depth);
  const CornerSpec spec = parse_corner(a.corner, a.n);
  AuditOptions opt;
  opt.mode = a.sampled ? AuditMode::sampled : AuditMode::exhaustive;
  if (a.delta != "auto") opt.delta = Scalar(parse_rational(a.delta));
  opt.max_pairs = c.max_pairs;
  opt.refine = c.refine;
  opt.seed = c.seed;
  opt.ceiling_bits = c.precision_ceiling_bits;
  const AuditReport r = containment_audit(sys, c.depth, spec, opt);
  emit(c, json(r), out,
       "containment " + spec.name() + " on " + sys.name() + ": verified " + std::to_string(r.counts.verified) + ", violated " +
           std::to_string(r.counts.violated) + ", unknown " + std::to_string(r.counts.unknown));
  return exit_for(outcome(r.counts.violated > 0, r.counts.unknown > 0), err);
}

int cmd_null(const RunConfig& c, const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  const auto [lo, hi] = parse_range(a.k_range);
  if (lo < 1) throw UsageError("--k-range: must start at >= 1");
  const CantorSystem sys = make_system(c, "", std::max(c.depth, hi + 1));
  const NullReport r = null_diagnostic(sys, a.m, lo, hi, c.precision_ceiling_bits);
  emit(c, json(r), out, "null diagnostic on " + sys.name() + (r.passed() ? ": pass" : ": not passed"));
  return exit_for(outcome(r.first_failure.has_value(), r.unknown > 0), err);
}

int cmd_fastness(const RunConfig& c, const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  const FastnessReport r = fastness_check(c.regime, a.j, a.k_max, c.precision_ceiling_bits);
  emit(c, json(r), out, "fastness " + std::string(to_string(c.regime)) + (r.passed() ? ": pass" : ": not passed"));
  return exit_for(outcome(r.first_failure.has_value(), r.unknown > 0), err);
}

struct EncodeArgs {
  std::string x;
  std::string y = "0";
  std::string addr;
  int n_max = 6;
  int separator_depth = 2;
  std::size_t samples = 16;
};

int cmd_x_tuple(const RunConfig& c, const EncodeArgs& a, std::ostream& out) {
  if (a.x.empty()) throw UsageError("--x: required");
  const Rational x = parse_rational(a.x), y = parse_rational(a.y);
  const std::array<Rational, 5> values = {x, y, x + y, x * y, dis_nat(x)};
  const auto addrs = x_tuple(x, y, c.depth);
  json comps = json::array();
  for (std::size_t i = 0; i < 5; ++i)
    comps.push_back({{"value", to_pq(values[i])},
                     {"address", addrs[i]},
                     {"decoded", to_pq(g_decode(addrs[i]))},
                     {"bound", to_pq(g_error_bound(values[i], c.depth))}});
  emit(c, {{"components", comps}}, out, "x-tuple at depth " + std::to_string(c.depth));
  return kPass;
}

int cmd_factorial(const RunConfig& c, const EncodeArgs& a, std::ostream& out) {
  if (a.n_max < 3) throw UsageError("--n-max: must be >= 3");
  const auto lengths = factorial_lengths(a.n_max);
  const IntervalSet e = gap_encoded_set(lengths, a.separator_depth);
  const FactorialDecode d = decode_factorial(boundary_extract(e, BoundaryKind::gap_lengths));
  json enc = json::array();
  for (const auto& q : lengths) enc.push_back(to_pq(q));
  json body = {{"encoded_lengths", enc}, {"components", e.size()}, {"decoded", d}};
  std::string summary = "decoded chain of " + std::to_string(d.chain.size());
  emit(c, std::move(body), out, summary);
  return kPass;
}

int cmd_k_demo(const RunConfig& c, const std::string& lengths, const EncodeArgs& a, std::ostream& out) {
  const CantorSystem sys = make_system(c, lengths, c.depth);
  const KDemo d = k_demo(sys, c.depth, a.samples, c.seed);
  json body = d;
  body["note"] = "finite sample of the packed image; closure represented by the declared tolerance";
  emit(c, std::move(body), out, "k-demo with " + std::to_string(d.packed.size()) + " packed samples");
  return kPass;
}

int cmd_g(const RunConfig& c, const std::string& lengths, const EncodeArgs& a, std::ostream& out) {
  if (a.x.empty() == a.addr.empty()) throw UsageError("--x/--addr: give exactly one");
  json body;
  if (!a.x.empty()) {
    const Rational x = parse_rational(a.x);
    const Address addr = g_encode(x, c.depth);
    const CantorSystem sys = make_system(c, lengths, c.depth);
    const Interval img = address_interval(sys, addr);
    body = {{"x", to_pq(x)},          {"address", addr},
            {"decoded", to_pq(g_decode(addr))}, {"bound", to_pq(g_error_bound(x, c.depth))},
            {"image", {img.lo, img.hi}}, {"system", sys.name()}};
    emit(c, std::move(body), out, "g(" + to_pq(x) + ") = " + addr);
  } else {
    const Rational v = g_decode(a.addr);
    body = {{"address", a.addr}, {"decoded", to_pq(v)}};
    emit(c, std::move(body), out, "g^-1(" + a.addr + ") ~ " + to_pq(v));
  }
  return kPass;
}

int cmd_transform(const RunConfig& c, BoundaryKind kind, const std::string& in, std::ostream& out) {
  const LoadedSet s = load_set(in);
  const auto values = boundary_extract(s.set, kind);
  emit(c, {{"kind", std::string(to_string(kind))}, {"input", in}, {"values", values}}, out,
       std::string(to_string(kind)) + ": " + std::to_string(values.size()) + " values");
  return kPass;
}

int cmd_report(const RunConfig& c, const std::vector<std::string>& ins, const std::string& csv, std::ostream& out) {
  json rows = json::array();
  std::string table = "file,command,passed,verified,violated,unknown\n";
  std::size_t failed = 0;
  for (const auto& path : ins) {
    const json j = read_json(path);
    json row = {{"file", path}};
    row["command"] = j.contains("config") ? j["config"].value("command", "") : "";
    auto field = [&](const char* key) { return j.contains(key) ? j[key] : json(nullptr); };
    row["passed"] = field("passed");
    row["verified"] = field("verified");
    row["violated"] = field("violated");
    row["unknown"] = field("unknown");
    if (row["passed"].is_boolean() && !row["passed"].get<bool>()) ++failed;
    auto cell = [](const json& v) { return v.is_null() ? std::string() : (v.is_string() ? v.get<std::string>() : v.dump()); };
    table += path + "," + cell(row["command"]) + "," + cell(row["passed"]) + "," + cell(row["verified"]) + "," +
             cell(row["violated"]) + "," + cell(row["unknown"]) + "\n";
    rows.push_back(std::move(row));
  }
  if (!csv.empty()) write_atomic(csv, table);
  emit(c, {{"reports", rows}, {"failed", failed}}, out,
       "summarized " + std::to_string(ins.size()) + " reports, " + std::to_string(failed) + " not passed");
  return kPass;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact Cantor-set construction, sparsity verification and encoding demos", "sparse-forge"};
  app.require_subcommand(1);
  Shared sh;
  DimsArgs dims;
  VerifyArgs va;
  EncodeArgs ea;
  std::string transform_in;
  std::vector<std::string> report_in;
  std::string report_csv;

  auto* build = app.add_subcommand("build", "construct a level set");
  add_shared(build, sh, 6);

  auto* dims_cmd = app.add_subcommand("dims", "covering profile and box-counting slope");
  add_shared(dims_cmd, sh, 8);
  dims_cmd->add_option("--in", dims.in, "set file from build")->check(CLI::ExistingFile);
  auto* rfr = dims_cmd->add_flag("--radii-from-regime", dims.radii_from_regime, "use the system's scales r_1..r_K (default)");
  dims_cmd->add_option("--radii", dims.radii, "comma-separated radii")
      ->excludes(rfr)
      ->check(parses_as([](const std::string& t) { parse_rationals(t); }, "RADII"));
  dims_cmd->add_option("--window", dims.window, "scale indices a:b")->check(parses_as(parse_range, "RANGE"));
  dims_cmd->add_option("--csv", dims.csv, "profile CSV path");
  dims_cmd->add_option("--plot", dims.plot, "plot-data CSV path");
  dims_cmd->add_option("--modulus", dims.modulus, "identity, pow:N or scale:q")
      ->check(parses_as([](const std::string& t) { parse_modulus(t); }, "MODULUS"));

  auto* verify = app.add_subcommand("verify", "run a verification");
  verify->require_subcommand(1);
  auto* scale = verify->add_subcommand("scale-lemma", "exhaustive scale-lemma check");
  add_shared(scale, sh, 8);
  scale->add_option("--k", va.k, "scale index (default: all k < depth)")->check(CLI::NonNegativeNumber);
  scale->add_option("--form", va.form, "differences, differences-literal-band or points")
      ->check(parses_as([](const std::string& t) { parse_scale_form(t); }, "FORM"));
  auto* cont = verify->add_subcommand("containment", "difference-set containment audit");
  add_shared(cont, sh, 6);
  cont->add_option("--n", va.n, "dimension (1 to 3)")->check(CLI::Range(1, 3));
  cont->add_option("--corner", va.corner, "poly:L or psi:L")
      ->check(parses_as([](const std::string& t) { parse_corner(t, 2); }, "CORNER"));
  cont->add_option("--delta", va.delta, "auto or a positive rational")
      ->check(parses_as([](const std::string& t) { if (t != "auto") parse_rational(t); }, "DELTA"));
  auto* ex = cont->add_flag("--exhaustive", "enumerate all endpoint differences (default)");
  cont->add_flag("--sampled", va.sampled, "sample component boxes")->excludes(ex);
  sh.opts["max-pairs"].push_back(cont->add_option("--max-pairs", sh.max_pairs, "sampled boxes"));
  sh.opts["refine"].push_back(cont->add_option("--refine", sh.refine, "extra levels for undecided boxes"));
  auto* null = verify->add_subcommand("null", "certified null-set diagnostic");
  add_shared(null, sh, 13);
  null->add_option("--m", va.m, "tower height m")->check(CLI::NonNegativeNumber);
  null->add_option("--k-range", va.k_range, "a:b")->check(parses_as(parse_range, "RANGE"));
  auto* fast = verify->add_subcommand("fastness", "fast-sequence conditions");
  add_shared(fast, sh, 6);
  fast->add_option("--j", va.j, "psi iterate")->check(CLI::NonNegativeNumber);
  fast->add_option("--k-max", va.k_max, "last index")->check(CLI::NonNegativeNumber);

  auto* encode = app.add_subcommand("encode", "encoding demos");
  encode->require_subcommand(1);
  auto* xt = encode->add_subcommand("x-tuple", "addresses of g(x), g(y), g(x+y), g(xy), g(dis(x))");
  add_shared(xt, sh, 20, false);
  sh.opts["depth"].push_back(xt->add_option("--depth", sh.depth, "address length (default 20)")->check(CLI::NonNegativeNumber));
  auto rational_check = parses_as([](const std::string& t) { parse_rational(t); }, "RATIONAL");
  xt->add_option("--x", ea.x, "rational x")->required()->check(rational_check);
  xt->add_option("--y", ea.y, "rational y")->check(rational_check);
  auto* fd = encode->add_subcommand("factorial-demo", "encode 1/n! gaps and decode them back");
  add_shared(fd, sh, 0, false);
  fd->add_option("--n-max", ea.n_max, "largest n")->check(CLI::Range(3, 20));
  fd->add_option("--separator-depth", ea.separator_depth, "middle-thirds depth of separators")->check(CLI::Range(0, 8));
  auto* kd = encode->add_subcommand("k-demo", "base set plus packed samples");
  add_shared(kd, sh, 4);
  kd->add_option("--samples", ea.samples, "number of packed samples");
  auto* g = encode->add_subcommand("g", "monotone codec");
  add_shared(g, sh, 24);
  g->add_option("--x", ea.x, "encode this rational")->check(rational_check);
  g->add_option("--addr", ea.addr, "decode this address")->check(CLI::Validator(
      [](std::string& s) { return s.find_first_not_of("01") == std::string::npos ? std::string() : std::string("bits must be 0 or 1"); },
      "BITS"));

  auto* transform = app.add_subcommand("transform", "boundary transforms of a set file");
  transform->require_subcommand(1);
  std::map<CLI::App*, BoundaryKind> kinds;
  for (BoundaryKind k : {BoundaryKind::midpoints, BoundaryKind::left_endpoints, BoundaryKind::gap_lengths}) {
    auto* t = transform->add_subcommand(std::string(to_string(k)), "list the " + std::string(to_string(k)) + " of the gaps");
    add_shared(t, sh, 0, false);
    t->add_option("--in", transform_in, "set file")->required()->check(CLI::ExistingFile);
    kinds[t] = k;
  }

  auto* report = app.add_subcommand("report", "summarize report files");
  add_shared(report, sh, 0, false);
  report->add_option("--in", report_in, "report files")->required()->check(CLI::ExistingFile);
  report->add_option("--csv", report_csv, "summary CSV path");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::ParseError& e) {
    // Help requested on a subcommand surfaces as CallForHelp from the sub.
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kPass;
    }
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    auto leaf = [](CLI::App* a) {
      while (!a->get_subcommands().empty()) a = a->get_subcommands().front();
      return a;
    };
    CLI::App* top = app.get_subcommands().front();
    CLI::App* sub = leaf(top);
    const std::string name = top == sub ? top->get_name() : top->get_name() + " " + sub->get_name();

    if (sub == build) {
      RunConfig c = resolve(sh, sub, name, "");
      if (c.out.empty()) c.out = "sets/e" + std::to_string(c.depth) + ".json";
      return cmd_build(c, sh.lengths, out);
    }
    if (sub == dims_cmd) return cmd_dims(resolve(sh, sub, name, "reports/dims.json"), sh.lengths, dims, out);
    if (sub == scale) return cmd_scale_lemma(resolve(sh, sub, name, "reports/scale-lemma.json"), va, out, err);
    if (sub == cont) return cmd_containment(resolve(sh, sub, name, "reports/containment.json"), va, out, err);
    if (sub == null) {
      RunConfig c = resolve(sh, sub, name, "reports/null.json");
      if (!sh.given("regime") && !sh.given("config")) c.regime = Regime::tower_fast;
      return cmd_null(c, va, out, err);
    }
    if (sub == fast) return cmd_fastness(resolve(sh, sub, name, "reports/fastness.json"), va, out, err);
    if (sub == xt) return cmd_x_tuple(resolve(sh, sub, name, "reports/x-tuple.json"), ea, out);
    if (sub == fd) return cmd_factorial(resolve(sh, sub, name, "reports/factorial-demo.json"), ea, out);
    if (sub == kd) return cmd_k_demo(resolve(sh, sub, name, "reports/k-demo.json"), sh.lengths, ea, out);
    if (sub == g) return cmd_g(resolve(sh, sub, name, "reports/g.json"), sh.lengths, ea, out);
    if (auto it = kinds.find(sub); it != kinds.end())
      return cmd_transform(resolve(sh, sub, name, "reports/" + sub->get_name() + ".json"), it->second, transform_in, out);
    if (sub == report) return cmd_report(resolve(sh, sub, name, "reports/summary.json"), report_in, report_csv, out);
    err << "usage error: no command\n";
    return kUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
}

}  // namespace sparse_forge::cli
