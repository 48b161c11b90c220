#ifndef LLINF_TOOLS_CLI_HPP
#define LLINF_TOOLS_CLI_HPP

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "llinf/llinf.hpp"

namespace llinf::cli {

enum Exit { ok = 0, rejected = 1, exhausted = 2, usage = 3 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// `// key: value` lines anywhere in a source file.
using Directives = std::multimap<std::string, std::string>;

struct Source {
  std::string path;
  Program program;
  Directives directives;
  bool lam() const { return program.lam; }
};

inline Directives read_directives(const std::string& text) {
  Directives d;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto c = line.find("//");
    if (c == std::string::npos) continue;
    std::string rest = line.substr(c + 2);
    auto colon = rest.find(':');
    if (colon == std::string::npos) continue;
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    std::string key = trim(rest.substr(0, colon));
    if (key.empty() || key.find(' ') != std::string::npos) continue;
    d.emplace(key, trim(rest.substr(colon + 1)));
  }
  return d;
}

inline std::optional<std::string> directive(const Directives& d, const std::string& key) {
  auto it = d.find(key);
  if (it == d.end()) return std::nullopt;
  return it->second;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// .lam files are pure programs whether or not they start with `lam`.
inline Source load(const std::string& path) {
  std::string text = slurp(path);
  Source s;
  s.path = path;
  s.directives = read_directives(text);
  bool lam_ext = std::filesystem::path(path).extension() == ".lam";
  std::string head = text;
  head.erase(0, head.find_first_not_of(" \t\r\n"));
  while (head.rfind("//", 0) == 0) {
    auto nl = head.find('\n');
    head = nl == std::string::npos ? "" : head.substr(nl + 1);
    head.erase(0, head.find_first_not_of(" \t\r\n"));
  }
  if (lam_ext && head.rfind("lam", 0) != 0) text = "lam " + text;
  s.program = parse_program(text);
  return s;
}

inline System parse_system(const std::string& s) {
  if (s == "llinf") return System::LLinf;
  if (s == "4s") return System::FourS;
  throw UsageError("unknown system '" + s + "' (llinf or 4s)");
}

inline DepthFlags flags_for(const Source& src, const std::string& given) {
  std::string text = given;
  if (text.empty() && src.program.flags) return *src.program.flags;
  if (text.empty()) text = directive(src.directives, "flags").value_or("000");
  auto f = parse_flags(text);
  if (!f) throw UsageError("flags must be three binary digits, got '" + text + "'");
  return *f;
}

// An inclusive range `a..b` or a single number.
inline std::pair<std::size_t, std::size_t> parse_range(const std::string& s) {
  try {
    auto dots = s.find("..");
    if (dots == std::string::npos) {
      std::size_t n = std::stoul(s);
      return {n, n};
    }
    std::size_t lo = std::stoul(s.substr(0, dots)), hi = std::stoul(s.substr(dots + 2));
    if (lo > hi) throw UsageError("empty range " + s);
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw UsageError("bad range '" + s + "'");
  }
}

struct Options {
  std::string file;
  std::string system = "llinf";
  std::optional<std::string> env;
  std::size_t depth = 2;
  std::size_t fuel = 1000;
  std::optional<std::size_t> height;
  std::string flags;
  std::uint64_t seed = 1;
  // command specific
  std::string depths = "0..2";
  std::optional<std::size_t> trace_bound;
  bool human = false;
  std::string into = "girard";
  int a = 0, b = 0;
  std::string sig = "01";
  std::string mode;
  std::size_t bound = 16;
  std::string spec;
  std::size_t count = 100;
  std::size_t max_nodes = 40;
  std::string bench_system = "both";
  std::string tsv;
};

// ---------------------------------------------------------------------------
// Commands

inline int cmd_check(const Options& o, std::ostream& out) {
  Source src = load(o.file);
  const Term& m = src.program.term;
  if (src.lam()) {
    DepthFlags f = flags_for(src, o.flags);
    CheckReport r = check_labc(m, f);
    out << "flags: " << flags_string(f) << "\n" << r.summary() << "\n";
    if (!r.accepted && !r.failing_path.empty()) out << "at " << path_string(r.failing_path) << "\n";
    return r.accepted ? ok : rejected;
  }
  System sys = parse_system(o.system);
  Environment env;
  if (auto e = o.env ? o.env : directive(src.directives, "env")) {
    env = parse_env(*e, sys);
  } else if (auto guess = infer_env(sys, m)) {
    env = *guess;
  } else {
    for (const auto& x : free_vars(m)) env[x] = Pattern::Lin;
  }
  CheckReport r = check(sys, env, m);
  out << "env: " << env_string(env) << "\n" << r.summary() << "\n";
  if (r.accepted)
    for (const std::string& c : r.cycles) out << "  " << c << "\n";
  else
    out << "at " << path_string(r.failing_path) << "\n";
  return r.accepted ? ok : rejected;
}

inline std::string steps_string(const std::map<std::size_t, std::size_t>& per_depth, std::size_t depth) {
  std::string s;
  for (std::size_t d = 0; d <= depth; ++d) {
    auto it = per_depth.find(d);
    s += (d ? " " : "") + std::to_string(d) + ":" + std::to_string(it == per_depth.end() ? 0 : it->second);
  }
  return s;
}

// Pure programs: Λ^{abc} steps depth by depth.
inline int eval_pure(const Source& src, const Options& o, std::ostream& out, bool trace) {
  DepthFlags f = flags_for(src, o.flags);
  Term cur = src.program.term;
  std::map<std::size_t, std::size_t> per_depth;
  std::size_t index = 0;
  for (std::size_t d = 0; d <= o.depth; ++d) {
    std::size_t spent = 0;
    while (auto s = lbeta_step(cur, d, f)) {
      if (spent == o.fuel) {
        out << "fuel exhausted at depth " << d << "\n";
        return exhausted;
      }
      ++spent;
      ++per_depth[d];
      if (trace) out << index << "\t" << d << "\t" << path_string(s->second) << "\n";
      ++index;
      cur = std::move(s->first);
    }
  }
  out << "outcome: normalized\nsteps: " << steps_string(per_depth, o.depth) << "\nresult:\n" << print_program(cur);
  return ok;
}

inline int cmd_eval(const Options& o, std::ostream& out, bool trace) {
  Source src = load(o.file);
  if (src.lam()) return eval_pure(src, o, out, trace);
  std::size_t index = 0;
  auto on_step = [&](const Term&, const StepRecord& r) {
    if (trace) out << (o.human ? trace_line_human(index, r) : trace_line(index, r)) << "\n";
    ++index;
  };
  EvalResult r = eval_lbl(src.program.term, o.depth, o.fuel, default_budget, on_step);
  switch (r.stats.outcome) {
    case Outcome::FuelExhausted:
      out << "fuel exhausted at depth " << *r.stats.exhausted_at << "\n";
      return exhausted;
    case Outcome::Stuck:
      out << "deadlocked at " << path_string(*r.stats.deadlock) << "\n";
      return rejected;
    case Outcome::Normalized: break;
  }
  out << "outcome: normalized\nsteps: " << steps_string(r.stats.steps_per_depth, o.depth) << "\n";
  out << "shape: " << shape_name(classify(r.final_term, o.height.value_or(static_cast<std::size_t>(-1)))) << "\n";
  out << "result:\n" << print_program(r.projection);
  return ok;
}

inline int cmd_weight(const Options& o, std::ostream& out) {
  Source src = load(o.file);
  auto [lo, hi] = parse_range(o.depths);
  out << "depth\tsize\tdf\ttwei\n";
  for (const MetricRow& row : metric_table(src.program.term, lo, hi))
    out << row.depth << "\t" << row.size << "\t" << row.df << "\t" << row.twei << "\n";
  if (!o.trace_bound) return ok;
  WeightTrace tr = weight_trace(src.program.term, *o.trace_bound, lbl_strategy(*o.trace_bound));
  out << "\nstep\tdepth";
  for (std::size_t d = 0; d <= *o.trace_bound; ++d) out << "\ttwei" << d;
  for (std::size_t d = 0; d <= *o.trace_bound; ++d) out << "\tdf" << d;
  out << "\n";
  for (std::size_t i = 0; i < tr.rows.size(); ++i) {
    const WeightSnapshot& s = tr.rows[i];
    out << i << "\t" << (s.step ? std::to_string(s.step->depth) : "-");
    for (auto v : s.twei) out << "\t" << v;
    for (auto v : s.df) out << "\t" << v;
    out << "\n";
  }
  out << "verdict: " << verdict_name(tr.verdict) << (tr.reason.empty() ? "" : " (" + tr.reason + ")") << "\n";
  if (tr.verdict == TraceVerdict::Fail) return tr.reason.find("no normal form") != std::string::npos ? exhausted : rejected;
  return ok;
}

inline int cmd_embed(const Options& o, std::ostream& out) {
  Source src = load(o.file);
  const Term& m = src.program.term;
  if (!is_pure(m)) throw UsageError("embed expects a pure lambda program");
  Term e;
  if (o.into == "girard")
    e = embed_girard(m, o.a != 0);
  else if (o.into == "cbv")
    e = embed_cbv(m, o.a != 0, o.b != 0);
  else
    throw UsageError("unknown embedding '" + o.into + "' (girard or cbv)");
  out << print_program(e);
  return ok;
}

inline Codec codec_named(const std::string& s) {
  if (s == "algebra") return Codec::Algebra;
  if (s == "coalgebra") return Codec::Coalgebra;
  throw UsageError("unknown mode '" + s + "' (algebra or coalgebra)");
}

inline int cmd_encode(const Options& o, std::ostream& out) {
  Signature phi = parse_signature(o.sig);
  CoTree t = parse_cotree(phi, o.spec);
  Codec c = o.mode.empty() ? (t.cyclic() ? Codec::Coalgebra : Codec::Algebra) : codec_named(o.mode);
  out << print_program(scott_encode(phi, t, c));
  return ok;
}

inline int cmd_decode(const Options& o, std::ostream& out) {
  Source src = load(o.file);
  Signature phi = parse_signature(o.sig);
  Codec c = codec_named(o.mode.empty() ? "coalgebra" : o.mode);
  Decoded d = scott_decode(src.program.term, phi, c, o.bound, o.fuel);
  switch (d.status) {
    case DecodeStatus::Ok: out << tree_string(phi, d.prefix) << "\n"; return ok;
    case DecodeStatus::FuelExhausted: out << d.message << "\n"; return exhausted;
    case DecodeStatus::ShapeMismatch: out << "not an encoding: " << d.message << "\n"; return rejected;
  }
  return rejected;
}

// ---------------------------------------------------------------------------
// Example files

struct ExampleResult {
  std::string file;
  std::vector<std::string> checked;
  std::vector<std::string> problems;
};

inline std::string example_verdict(const Source& src, const std::string& expect) {
  const Term& m = src.program.term;
  if (expect == "accepted" || expect == "rejected") {
    bool acc;
    if (src.lam()) {
      acc = check_labc(m, flags_for(src, "")).accepted;
    } else {
      System sys = parse_system(directive(src.directives, "system").value_or("llinf"));
      Environment env = parse_env(directive(src.directives, "env").value_or(""), sys);
      acc = check(sys, env, m).accepted;
    }
    return acc ? "accepted" : "rejected";
  }
  std::size_t depth = std::stoul(directive(src.directives, "depth").value_or("2"));
  std::size_t fuel = std::stoul(directive(src.directives, "fuel").value_or("1000"));
  if (src.lam()) {
    DepthFlags f = flags_for(src, "");
    Term cur = m;
    for (std::size_t d = 0; d <= depth; ++d)
      for (std::size_t spent = 0;; ++spent) {
        auto s = lbeta_step(cur, d, f);
        if (!s) break;
        if (spent == fuel) return "fuel-exhausted";
        cur = std::move(s->first);
      }
    return "normalized";
  }
  EvalResult r = eval_lbl(m, depth, fuel);
  switch (r.stats.outcome) {
    case Outcome::Normalized: return "normalized";
    case Outcome::FuelExhausted: return "fuel-exhausted";
    case Outcome::Stuck: return "deadlocked";
  }
  return "?";
}

inline ExampleResult run_example(const std::string& path) {
  ExampleResult res;
  res.file = std::filesystem::path(path).filename().string();
  Source src;
  try {
    src = load(path);
  } catch (const std::exception& e) {
    res.problems.push_back(std::string("does not parse: ") + e.what());
    return res;
  }
  auto [lo, hi] = src.directives.equal_range("expect");
  if (lo == hi) res.problems.push_back("no documented verdict");
  for (auto it = lo; it != hi; ++it) {
    static const std::vector<std::string> known = {"accepted", "rejected", "normalized", "deadlocked",
                                                   "fuel-exhausted"};
    if (std::find(known.begin(), known.end(), it->second) == known.end()) {
      res.problems.push_back("unknown verdict '" + it->second + "'");
      continue;
    }
    std::string got = example_verdict(src, it->second);
    res.checked.push_back(got);
    if (got != it->second) res.problems.push_back("expected " + it->second + ", got " + got);
  }
  return res;
}

inline std::vector<std::string> example_files(const std::string& dir) {
  std::vector<std::string> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    auto ext = e.path().extension();
    if (ext == ".lli" || ext == ".lam") files.push_back(e.path().string());
  }
  std::sort(files.begin(), files.end());
  return files;
}

inline int cmd_examples(const Options& o, std::ostream& out) {
  std::string dir = o.file.empty() ? "tests/examples" : o.file;
  if (!std::filesystem::is_directory(dir)) throw UsageError("no such directory " + dir);
  int failed = 0;
  auto files = example_files(dir);
  for (const std::string& f : files) {
    ExampleResult r = run_example(f);
    std::string verdicts;
    for (const auto& v : r.checked) verdicts += (verdicts.empty() ? "" : ", ") + v;
    if (r.problems.empty()) {
      out << "ok\t" << r.file << "\t" << verdicts << "\n";
    } else {
      ++failed;
      for (const auto& p : r.problems) out << "FAIL\t" << r.file << "\t" << p << "\n";
    }
  }
  out << files.size() - static_cast<std::size_t>(failed) << "/" << files.size() << " examples match\n";
  return failed ? rejected : ok;
}

// ---------------------------------------------------------------------------
// Bench

inline void report_line(std::ostream& out, const PropertyReport& r, const char* expectation = "pass") {
  bool expected_fail = std::string(expectation) == "expected-failure";
  bool good = expected_fail ? !r.ok() : r.ok();
  out << r.name << "\t" << r.trials << "\t" << r.failed << "\t" << r.skipped << "\t"
      << (good ? (expected_fail ? "expected-failure" : "pass") : "FAIL") << "\n";
  if (!expected_fail)
    for (const auto& f : r.failures) out << "  " << f << "\n";
}

inline int cmd_bench(const Options& o, std::ostream& out) {
  bool fours = o.bench_system == "4s" || o.bench_system == "both";
  bool full = o.bench_system == "llinf" || o.bench_system == "both";
  if (!fours && !full) throw UsageError("unknown system '" + o.bench_system + "' (llinf, 4s or both)");
  std::vector<PropertyReport> reps;
  out << "seed " << o.seed << ", " << o.count << " terms per suite, at most " << o.max_nodes << " nodes\n";
  out << "property\ttrials\tfailed\tskipped\tstatus\n";
  std::size_t n = o.max_nodes;
  if (full) {
    reps.push_back(subject_reduction(System::LLinf, o.seed, o.count, 3, n));
    reps.push_back(diamond(System::LLinf, o.seed, o.count, 2, n));
  }
  if (fours) {
    reps.push_back(subject_reduction(System::FourS, o.seed, o.count, 3, n));
    reps.push_back(diamond(System::FourS, o.seed, o.count, 2, n));
    reps.push_back(weight_laws(o.seed, o.count, 3, 200, n));
    reps.push_back(confluence(o.seed, o.count, 2, n));
  }
  bool all = true;
  for (const auto& r : reps) {
    report_line(out, r);
    all = all && r.ok();
  }
  // the full calculus is not confluent: this one must fail
  NonconfluenceReport nc = nonconfluence_witness();
  PropertyReport joins;
  joins.name = "nonconf joinability";
  joins.trials = 1;
  if (!nc.joined && nc.targets_differ && nc.even_reaches_l && nc.odd_reaches_p) joins.fail("no common reduct");
  report_line(out, joins, "expected-failure");
  all = all && !joins.ok();

  if (!o.tsv.empty()) {
    std::ofstream t(o.tsv);
    if (!t) throw UsageError("cannot write " + o.tsv);
    t << "term\tnodes\tdepth\tsize\tdf\ttwei\n";
    std::mt19937_64 rng(o.seed);
    GenOptions opt;
    opt.system = System::FourS;
    opt.max_nodes = n;
    for (std::size_t i = 0; i < o.count; ++i) {
      Generated g = random_wellformed(rng, opt);
      for (const MetricRow& row : metric_table(g.term, 0, 3))
        t << i << "\t" << g.term.size() << "\t" << row.depth << "\t" << row.size << "\t" << row.df << "\t" << row.twei
          << "\n";
    }
  }
  out << (all ? "all properties as expected" : "unexpected failures") << "\n";
  return all ? ok : rejected;
}

// ---------------------------------------------------------------------------

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"llinf: linear infinitary lambda calculus toolkit"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* c, bool file = true) {
    if (file) c->add_option("file", o.file, "term file (.lli or .lam)")->required();
    c->add_option("--system", o.system, "llinf or 4s");
    c->add_option("--env", o.env, "environment, e.g. \"!y, #z\"");
    c->add_option("--depth", o.depth, "depth to normalize up to");
    c->add_option("--fuel", o.fuel, "steps allowed per depth");
    c->add_option("--height", o.height, "height bound for classification");
    c->add_option("--flags", o.flags, "lambda-infty depth flags, e.g. 001");
    c->add_option("--seed", o.seed, "random seed");
  };
  auto* check = app.add_subcommand("check", "decide well-formation");
  common(check);
  auto* eval = app.add_subcommand("eval", "level-by-level evaluation");
  common(eval);
  auto* trace = app.add_subcommand("trace", "evaluation with one line per step");
  common(trace);
  trace->add_flag("--human", o.human, "readable step lines");
  auto* weight = app.add_subcommand("weight", "size, df and twei per depth");
  common(weight);
  weight->add_option("--depths", o.depths, "range such as 0..2");
  weight->add_option("--trace", o.trace_bound, "also follow lbl steps, tracking depths up to N");
  auto* embed = app.add_subcommand("embed", "translate a pure lambda program");
  common(embed);
  embed->add_option("--into", o.into, "girard or cbv");
  embed->add_option("-a", o.a, "box kind for arguments (0 inductive, 1 coinductive)");
  embed->add_option("-b", o.b, "box kind for values in cbv");
  auto* encode = app.add_subcommand("encode", "Scott-encode a word or tree");
  encode->add_option("spec", o.spec, "word like 01e or 0(1), or tree like f(g, X) where X = ...")->required();
  encode->add_option("--sig", o.sig, "alphabet letters or sig NAME { f/2, g/0 }");
  encode->add_option("--mode", o.mode, "algebra or coalgebra");
  auto* decode = app.add_subcommand("decode", "read back a Scott encoding");
  common(decode);
  decode->add_option("--sig", o.sig, "alphabet letters or sig NAME { f/2, g/0 }");
  decode->add_option("--mode", o.mode, "algebra or coalgebra");
  decode->add_option("--bound", o.bound, "constructors to read");
  auto* examples = app.add_subcommand("examples", "check the documented verdicts of example files");
  examples->add_option("dir", o.file, "directory of .lli/.lam files");
  auto* bench = app.add_subcommand("bench", "run the property suites on generated terms");
  bench->add_option("--seed", o.seed, "random seed");
  bench->add_option("--count", o.count, "terms per suite");
  bench->add_option("--max-nodes", o.max_nodes, "size bound of generated terms");
  bench->add_option("--system", o.bench_system, "llinf, 4s or both");
  bench->add_option("--tsv", o.tsv, "write per-term metrics here");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? ok : usage;
  }
  try {
    if (check->parsed()) return cmd_check(o, out);
    if (eval->parsed()) return cmd_eval(o, out, false);
    if (trace->parsed()) return cmd_eval(o, out, true);
    if (weight->parsed()) return cmd_weight(o, out);
    if (embed->parsed()) return cmd_embed(o, out);
    if (encode->parsed()) return cmd_encode(o, out);
    if (decode->parsed()) return cmd_decode(o, out);
    if (examples->parsed()) return cmd_examples(o, out);
    if (bench->parsed()) return cmd_bench(o, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return usage;
  } catch (const UsageError& e) {
    err << e.what() << "\n";
    return usage;
  } catch (const BudgetExceeded& e) {
    err << e.what() << "\n";
    return exhausted;
  } catch (const std::invalid_argument& e) {
    err << e.what() << "\n";
    return usage;
  }
  return usage;
}

}  // namespace llinf::cli

#endif
