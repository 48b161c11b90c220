#include <gtest/gtest.h>

#include "llinf/parse.hpp"
#include "llinf/print.hpp"
#include "llinf/properties.hpp"
#include "llinf/wellform.hpp"

using namespace llinf;

namespace {

Term P(const std::string& s) { return parse_term(s); }
Environment E(const std::string& s, System sys = System::FourS) { return parse_env(s, sys); }

}  // namespace

TEST(Occurrences, Examples) {
  OccSummary o = occurrences(P("def M = y #M ; root M"), "y");
  EXPECT_EQ(o.linear, 1u);  // the head occurrence of the root itself
  EXPECT_TRUE(o.coind());
  EXPECT_TRUE(o.infinite());

  o = occurrences(P("x"), "x");
  EXPECT_EQ(o, (OccSummary{1, 0, 0, 0}));
  o = occurrences(P("x !x"), "x");
  EXPECT_EQ(o, (OccSummary{1, 1, 0, 0}));
  EXPECT_FALSE(o.infinite());
  o = occurrences(P("!(!x) x x"), "x");
  EXPECT_EQ(o, (OccSummary{2, 0, 1, 0}));
  EXPECT_EQ(o.total(), 3u);
}

TEST(Occurrences, UnderBoxOnlyOfCycle) {
  // only the boxed copies repeat
  OccSummary o = occurrences(P("def M = #(y M) ; root M"), "y");
  EXPECT_EQ(o.linear, 0u);
  EXPECT_TRUE(o.coind());
  EXPECT_TRUE(o.infinite());
}

TEST(CheckLLinf, FigureTwo) {
  CheckReport pi = check_llinf(E("!y", System::LLinf), P("def M = y #M ; root M"));
  EXPECT_TRUE(pi.accepted) << pi.reason;
  EXPECT_EQ(pi.cycles.size(), 1u);
  CheckReport rho = check_llinf({}, P("def N = N (\\x. x) ; root N"));
  EXPECT_FALSE(rho.accepted);
  EXPECT_EQ(rho.reason, "inductive-only loop N =f=> N");
}

TEST(CheckLLinf, Basics) {
  EXPECT_TRUE(check_llinf(E("x", System::LLinf), P("x")).accepted);
  EXPECT_FALSE(check_llinf({}, P("x")).accepted);
  EXPECT_FALSE(check_llinf(E("x", System::LLinf), P("x x")).accepted);
  EXPECT_FALSE(check_llinf(E("x", System::LLinf), P("!x")).accepted);
  EXPECT_TRUE(check_llinf(E("!x", System::LLinf), P("x !x #x")).accepted);
  EXPECT_FALSE(check_llinf(E("x,y", System::LLinf), P("y")).accepted);
  EXPECT_TRUE(check_llinf({}, P("\\!x. x !x")).accepted);
  EXPECT_FALSE(check_llinf({}, P("\\x. \\y. x")).accepted);
  EXPECT_TRUE(check_llinf({}, P("def K = \\#x. \\#y. x ; root K")).accepted);
}

TEST(CheckLLinf, FailingPathAndReason) {
  CheckReport r = check_llinf(E("x", System::LLinf), P("f !(g x)"));
  EXPECT_FALSE(r.accepted);
  // f is not in the environment, found first
  EXPECT_EQ(path_string(r.failing_path), "f");
  r = check_llinf(E("x,!f,!g", System::LLinf), P("f !(g x)"));
  EXPECT_FALSE(r.accepted);
  EXPECT_NE(r.reason.find("linear variable x"), std::string::npos);
}

TEST(CheckLLinf, Nonconfluent) {
  Term m = P("def K = \\#x. \\#y. x ; def I = \\#x. x ; def M = K #N #K ; def N = K #M #I ; root M");
  EXPECT_TRUE(check_llinf({}, m).accepted);
}

TEST(Check4S, Fixpoints) {
  Term x = P("def M = \\#x. \\y. \\#z. y #(x #x z #z) ; def X = M #M ; root X");
  CheckReport r = check_ll4s({}, x);
  EXPECT_TRUE(r.accepted) << r.reason;
  // the literal carrier with y under the box is not 4S
  EXPECT_FALSE(check_ll4s({}, P("\\#x. \\y. \\#z. y #(x y z #z)")).accepted);
  EXPECT_FALSE(check_ll4s({}, P("\\!x. x !x")).accepted);
  EXPECT_TRUE(check_llinf({}, P("\\!x. x !x")).accepted);
}

TEST(Check4S, PatternRules) {
  EXPECT_TRUE(check_ll4s(E("^x"), P("x x")).accepted);
  EXPECT_FALSE(check_ll4s(E("^x"), P("!x")).accepted);
  EXPECT_TRUE(check_ll4s(E("!x"), P("!x")).accepted);
  EXPECT_FALSE(check_ll4s(E("!x"), P("!x !x")).accepted);
  EXPECT_FALSE(check_ll4s(E("!x"), P("x")).accepted);
  EXPECT_FALSE(check_ll4s(E("!x"), P("#x")).accepted);
  EXPECT_FALSE(check_ll4s(E("#x"), P("x")).accepted);
  EXPECT_TRUE(check_ll4s(E("#x"), P("#x #(x x)")).accepted);
  EXPECT_TRUE(check_ll4s(E("#x"), P("!(#x)")).accepted);
  EXPECT_TRUE(check_ll4s(E("*x"), P("x !x #x")).accepted);
  EXPECT_FALSE(check_ll4s(E("!x"), P("y")).accepted);  // once-boxed obligation unused
  EXPECT_TRUE(check_ll4s(E("^x,y"), P("y")).accepted);    // weakening
  // K fails in 4S: x is a coinductive variable used at an axiom
  EXPECT_FALSE(check_ll4s({}, P("\\#x. \\#y. x")).accepted);
  EXPECT_TRUE(check_ll4s({}, P("\\!x. !x")).accepted);
  EXPECT_TRUE(check_ll4s({}, P("\\!x. x x")).accepted);
  EXPECT_TRUE(check_ll4s({}, P("\\!x. y")).accepted == false);  // y free, not in env
}

TEST(Check4S, StreamEncodingIsAccepted) {
  EXPECT_TRUE(check_ll4s({}, P("def S = \\!a. \\!b. \\!e. a #S ; root S")).accepted);
}

TEST(InferEnv, Examples) {
  auto e = infer_env(System::LLinf, P("def M = y #M ; root M"));
  ASSERT_TRUE(e);
  EXPECT_EQ(env_string(*e), "!y");
  e = infer_env(System::FourS, P("\\x. x"));
  ASSERT_TRUE(e);
  EXPECT_TRUE(e->empty());
  e = infer_env(System::FourS, P("x z"));
  ASSERT_TRUE(e);
  EXPECT_EQ(env_string(*e), "x,z");
  e = infer_env(System::FourS, P("x x !y #z"));
  ASSERT_TRUE(e);
  EXPECT_EQ(env_string(*e), "^x,!y,#z");
  EXPECT_FALSE(infer_env(System::FourS, P("\\!x. x !x")));
}

TEST(EnvPrecedes, Relation) {
  EXPECT_TRUE(env_precedes(E("!x"), E("^x")));
  EXPECT_TRUE(env_precedes(E("!x,y"), E("!x,y")));
  EXPECT_FALSE(env_precedes(E("x"), E("^x")));
  EXPECT_FALSE(env_precedes(E("^x"), E("!x")));
  EXPECT_FALSE(env_precedes(E("x"), E("x,y")));
}

TEST(ParseEnv, Syntax) {
  EXPECT_TRUE(parse_env("", System::LLinf).empty());
  EXPECT_EQ(env_string(parse_env(" x , !y,#z ", System::LLinf)), "x,!y,#z");
  EXPECT_THROW(parse_env("^x", System::LLinf), std::invalid_argument);
  EXPECT_THROW(parse_env("x,x", System::FourS), std::invalid_argument);
}

TEST(Check, StableUnderUnfolding) {
  const char* srcs[] = {"def M = y #M ; root M", "def N = N (\\x. x) ; root N",
                        "def S = \\!a. \\!b. \\!e. a #S ; root S",
                        "def A = #(B) ; def B = \\x. x A ; root A"};
  const char* unfolded[] = {"def M = y #(y #M) ; root M", "def N = N (\\x. x) (\\x. x) ; root N",
                            "def S = \\!a. \\!b. \\!e. a #(\\!a. \\!b. \\!e. a #S) ; root S",
                            "def A = #(\\x. x A) ; root A"};
  for (int i = 0; i < 4; ++i) {
    for (System sys : {System::LLinf, System::FourS}) {
      Term a = P(srcs[i]), b = P(unfolded[i]);
      auto env = sys == System::LLinf ? E("!y", sys) : E("*y", sys);
      if (i != 0) env.clear();
      EXPECT_EQ(check(sys, env, a).accepted, check(sys, env, b).accepted) << srcs[i];
    }
  }
}

TEST(SubjectReduction, RandomSteps) {
  for (System sys : {System::LLinf, System::FourS}) {
    PropertyReport rep = subject_reduction(sys, 11, 300);
    EXPECT_EQ(rep.trials, 300u);
    EXPECT_TRUE(rep.ok()) << rep.failures.front();
  }
}

// Substituting a closed, non-linear term for a linear or once-boxed variable
// keeps the judgment derivable.
TEST(Substitution, LinearAndOnceBoxed) {
  for (System sys : {System::LLinf, System::FourS}) {
    std::mt19937_64 rng(5);
    GenOptions with, without;
    with.system = without.system = sys;
    without.linear_globals = false;
    int tested = 0;
    while (tested < 150) {
      Generated m = random_wellformed(rng, with);
      std::string x = m.env.count("u") ? "u" : m.env.count("v") ? "v" : "";
      if (x.empty()) continue;
      Generated n = random_wellformed(rng, without);
      Term out = substitute(m.term, x, n.term);
      Environment env = m.env;
      env.erase(x);
      env.insert(n.env.begin(), n.env.end());
      ++tested;
      EXPECT_TRUE(check(sys, env, out).accepted)
          << env_string(m.env) << " |- " << print_term(m.term) << " with " << x << " := " << print_term(n.term);
    }
  }
}
