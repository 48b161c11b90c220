// One line per acceptance criterion; the exit status is nonzero if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "llinf/llinf.hpp"
#include "oracles.hpp"

using namespace llinf;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

constexpr std::uint64_t seed = 20240611;
const std::string examples_dir = LLINF_EXAMPLES_DIR;

int cli_run(std::vector<std::string> args, std::string& out) {
  std::ostringstream o, e;
  int code = cli::run(args, o, e);
  out = o.str() + e.str();
  return code;
}

std::string first_failure(const PropertyReport& r) { return r.failures.empty() ? "" : ": " + r.failures.front(); }

// The 4S terms shared by criteria 3 and 4.
const std::vector<Term>& weight_terms() {
  static const std::vector<Term> terms = generate_terms(System::FourS, seed + 3, 200);
  return terms;
}

Verdict fig2() {
  Verdict o;
  std::string out;
  int code = cli_run({"check", "--system", "llinf", "--env", "!y", examples_dir + "/stream_guarded.lli"}, out);
  o.require(code == 0 && out.find("\naccepted") != std::string::npos, "M = y #M not accepted under !y: " + out);
  code = cli_run({"check", "--system", "llinf", "--env", "", examples_dir + "/loop_unguarded.lli"}, out);
  o.require(code == 1, "N = N (\\x. x) not rejected");
  o.require(out.find("rejected: inductive-only loop N =f=> N") != std::string::npos, "rejection trace: " + out);
  if (o.pass) o.detail = "y #M accepted; N = N (\\x. x) rejected with inductive-only loop N =f=> N";
  return o;
}

Verdict subject_reduction_run() {
  Verdict o;
  std::size_t total = 0;
  for (System sys : {System::LLinf, System::FourS}) {
    PropertyReport r = subject_reduction(sys, seed + 2, 500, 3, 40);
    total += r.trials;
    o.require(r.trials == 500, r.name + ": only " + std::to_string(r.trials) + " steps");
    o.require(r.ok(), r.name + first_failure(r));
  }
  if (o.pass) o.detail = std::to_string(total) + " steps, 0 failures";
  return o;
}

Verdict weight_laws_run() {
  Verdict o;
  PropertyReport r = weight_laws_on(weight_terms(), seed + 4, 3);
  o.require(r.trials == 200 && r.ok(), r.name + first_failure(r));
  std::size_t compared = 0;
  using testing_support::Oracle;
  for (const Term& m : weight_terms())
    for (std::size_t d = 0; d <= 3; ++d) {
      std::uint64_t f = df(m, d);
      bool same = size_at(m, d) == testing_support::oracle_metric(m, d, Oracle::Size) &&
                  f == testing_support::oracle_metric(m, d, Oracle::Dup) &&
                  wei(m, f, d) == testing_support::oracle_metric(m, d, Oracle::Weight, f);
      o.require(same, "metric and oracle disagree at depth " + std::to_string(d) + " on " + print_term(m));
      ++compared;
    }
  if (o.pass) o.detail = "200 terms, 0 failures; oracle agrees on " + std::to_string(compared) + " (term, depth) pairs";
  return o;
}

Verdict normalisation_run() {
  Verdict o;
  const std::size_t fuel = 100000;
  std::size_t steps = 0, most = 0;
  for (const Term& m : weight_terms()) {
    Term last = m;
    std::map<std::size_t, std::uint64_t> bound;
    auto on_step = [&](const Term& next, const StepRecord& r) {
      if (!bound.count(r.depth)) bound[r.depth] = twei(last, r.depth);
      last = next;
    };
    EvalResult r = eval_lbl(m, 3, fuel, default_budget, on_step);
    o.require(r.stats.outcome == llinf::Outcome::Normalized, "not normalized: " + print_term(m));
    for (const auto& [d, n] : r.stats.steps_per_depth) {
      o.require(n <= bound[d], std::to_string(n) + " steps at depth " + std::to_string(d) + " exceed twei " +
                                   std::to_string(bound[d]) + " for " + print_term(m));
      most = std::max(most, n);
    }
    steps += r.stats.fuel_consumed;
  }
  o.require(most < fuel, "fuel was binding");
  if (o.pass)
    o.detail = "200 terms normalized at depths 0..3, " + std::to_string(steps) + " steps, at most " +
               std::to_string(most) + " per depth";
  return o;
}

Verdict confluence_run() {
  Verdict o;
  PropertyReport r = confluence(seed + 5, 100, 2);
  o.require(r.trials == 100 && r.ok(), r.name + first_failure(r));
  if (o.pass) o.detail = "100 terms, both strategies agree to depth 2";
  return o;
}

Verdict nonconfluence_run() {
  Verdict o;
  NonconfluenceReport r = nonconfluence_witness(6, 3);
  o.require(r.even_reaches_l && r.even_steps <= 8, "even-depth strategy does not reach L");
  o.require(r.odd_reaches_p && r.odd_steps <= 8, "odd-depth strategy does not reach P");
  o.require(r.targets_differ, "L and P agree at depth 1");
  o.require(!r.joined, "join search found a common reduct");
  if (o.pass)
    o.detail = "even reaches L in " + std::to_string(r.even_steps) + " steps, odd reaches P in " +
               std::to_string(r.odd_steps) + "; no join among " + std::to_string(r.explored) + " reducts";
  return o;
}

Verdict fixpoints_run() {
  Verdict o;
  Term x = guarded_fixpoint();
  Term start = make_apps(x, {make_free("N"), make_box(Mode::Coind, make_free("N"))});
  Term target = make_app(make_free("N"), make_box(Mode::Coind, start));
  Term cur = start;
  std::size_t reached = 0;
  for (std::size_t i = 1; i <= 6 && !reached; ++i) {
    auto s = step_lbl(cur);
    if (!s) break;
    cur = s->first;
    if (graph_bisimilar(cur, target)) reached = i;
  }
  o.require(reached == 3, "X N #N reaches N #(X N #N) after " + std::to_string(reached) + " steps");
  for (bool a : {false, true}) {
    Term y = make_app(fixpoint(a), make_box(Mode::Ind, make_free("M")));
    Term unrolled = make_app(make_free("M"), make_box(a ? Mode::Coind : Mode::Ind, y));
    Term t = y;
    for (int i = 0; i < 2; ++i)
      if (auto s = step_lbl(t)) t = s->first;
    o.require(equal_at_depth(t, unrolled, 2), std::string("Y_") + (a ? "1" : "0") + " !M does not unroll");
  }
  EvalResult r = eval_lbl(make_app(fixpoint(true), make_box(Mode::Ind, make_free("M"))), 2, 100);
  o.require(equal_at_depth(r.final_term, parse_term("def T = M #T ; root T"), 2), "Y_1 !M is not M #(M #(M ...))");
  if (o.pass) o.detail = "X N #N unrolls in exactly 3 steps; Y_0, Y_1 unroll after 2, Y_1 !M agrees with M #T at depth 2";
  return o;
}

Verdict simulation_run() {
  Verdict o;
  std::mt19937_64 rng(seed + 8);
  std::size_t source_steps = 0, cbv_steps = 0, cbv_target = 0;
  for (int i = 0; i < 100; ++i) {
    Term m = random_pure_term(rng, 20, {"x", "y"});
    SimulationReport r = simulate_check(m, false, 10);
    o.require(r.passed, print_program(m) + ": " + r.failure);
    source_steps += r.steps;
    for (bool k : {false, true}) {
      SimulationReport c = simulate_cbv_check(m, k, k, 10);
      o.require(c.passed, "cbv " + print_program(m) + ": " + c.failure);
      o.require(c.target_steps == 2 * c.steps, "cbv ratio broken on " + print_program(m));
      cbv_steps += c.steps;
      cbv_target += c.target_steps;
    }
  }
  int regular = 0;
  while (regular < 10) {
    Term m = random_regular_pure_term(rng, 20, {"x"}, {false, false, true});
    if (!has_redex(m) || !is_cyclic(m)) continue;
    ++regular;
    SimulationReport r = simulate_check(m, true, 10);
    o.require(r.passed, print_program(m) + ": " + r.failure);
    source_steps += r.steps;
  }
  if (o.pass)
    o.detail = "110 terms, " + std::to_string(source_steps) + " paired steps; cbv " + std::to_string(cbv_target) +
               " image steps for " + std::to_string(cbv_steps);
  return o;
}

Verdict encodings_run() {
  Verdict o;
  const Signature bits = alphabet("01");
  std::size_t words = 0;
  for (int len = 0; len <= 6; ++len)
    for (int v = 0; v < (1 << len); ++v) {
      std::string w;
      for (int i = 0; i < len; ++i) w += (v >> i & 1) ? '1' : '0';
      CoTree t = parse_cotree(bits, w);
      Decoded d = scott_decode(scott_encode(bits, t, Codec::Algebra), bits, Codec::Algebra, 32, 100);
      o.require(d.status == DecodeStatus::Ok && same_tree(d.prefix, t), "round trip of '" + w + "'");
      ++words;
    }
  const char* streams[] = {"(0)", "(1)", "(01)", "0(1)", "1(0)", "01(10)", "(001)", "110(0)", "(0110)", "1(011)"};
  for (const char* s : streams) {
    CoTree t = parse_cotree(bits, s);
    Decoded d = scott_decode(scott_encode(bits, t, Codec::Coalgebra), bits, Codec::Coalgebra, 16, 100);
    o.require(d.status == DecodeStatus::Ok && same_tree(d.prefix, tree_prefix(t, 16)),
              std::string("stream prefix of ") + s);
  }
  // selector: M enc(b s) !N0 !N1 !Ne => Nb !enc(s), and M enc(ε) ... => Ne
  Term sel = selector(bits);
  std::vector<Term> branches;
  for (const char* n : {"N0", "N1", "Ne"}) branches.push_back(make_box(Mode::Ind, make_free(n)));
  auto dispatch = [&](const Term& s) {
    std::vector<Term> args{s};
    args.insert(args.end(), branches.begin(), branches.end());
    return eval_lbl(make_apps(sel, args), 0, 100).final_term;
  };
  for (const char* w : {"0", "1", "01", "110"}) {
    std::string tail = std::string(w).substr(1);
    Term enc = scott_encode(bits, parse_cotree(bits, w), Codec::Algebra);
    Term want = make_app(make_free(w[0] == '0' ? "N0" : "N1"),
                         make_box(Mode::Ind, scott_encode(bits, parse_cotree(bits, tail), Codec::Algebra)));
    o.require(graph_bisimilar(dispatch(enc), want), std::string("selector on ") + w);
  }
  o.require(graph_bisimilar(dispatch(scott_encode(bits, parse_cotree(bits, ""), Codec::Algebra)), make_free("Ne")),
            "selector on ε");
  Term id = parse_term("\\z. z");
  EvalResult proj = eval_lbl(make_app(tuple({id}), parse_term("\\!p. p")), 0, 10);
  o.require(proj.stats.fuel_consumed == 2 && graph_bisimilar(proj.final_term, id), "tuple projection");
  HarnessVerdict flip = representability_harness(bit_flip(), bits, {parse_cotree(bits, "(0)")}, {DataKind::Inf},
                                                 parse_cotree(bits, "(1)"), DataKind::Inf, 4, 1000);
  o.require(flip.passed, "bit flip: " + flip.diff);
  if (o.pass)
    o.detail = std::to_string(words) + " words and 10 streams round-trip; selector, tuple laws hold; bit flip gives " +
               flip.got;
  return o;
}

Verdict counterexamples_run() {
  Verdict o;
  NonNormalFormReport r = nonnf_witness();
  o.require(r.n_reducible && r.l_reducible, "N or L is not reducible");
  o.require(r.n_reaches_p && r.l_reaches_p, "N or L does not reach P at depth 2");
  o.require(classify(counterexamples().at("deadlock")) == Shape::Deadlocked, "deadlock term not deadlocked");
  if (o.pass) o.detail = "N, L reducible and reach P at depth 2; (\\!x. x) #M deadlocked";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "well-formation examples", fig2},
      {2, "subject reduction", subject_reduction_run},
      {3, "weight laws", weight_laws_run},
      {4, "normalisation within twei", normalisation_run},
      {5, "strong confluence", confluence_run},
      {6, "non-confluence of the full calculus", nonconfluence_run},
      {7, "fixpoints", fixpoints_run},
      {8, "simulation", simulation_run},
      {9, "encodings", encodings_run},
      {10, "counterexamples", counterexamples_run},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Verdict o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    char t[32];
    std::snprintf(t, sizeof t, "%.2fs", secs);
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << c.id << " " << c.name << ": " << o.detail << " (" << t << ")"
              << std::endl;
  }
  return failed ? 1 : 0;
}
