#include <gtest/gtest.h>

#include <random>

#include "llinf/generate.hpp"
#include "llinf/lambda_infty.hpp"
#include "llinf/parse.hpp"
#include "llinf/print.hpp"

using namespace llinf;

namespace {

Term L(const std::string& s) { return parse_program("lam " + s).term; }
DepthFlags F(const char* s) { return *parse_flags(s); }

}  // namespace

TEST(CheckLabc, Examples) {
  Term lam_loop = L("def M = \\x. M ; root M");
  EXPECT_TRUE(check_labc(lam_loop, F("100")).accepted);
  EXPECT_FALSE(check_labc(lam_loop, F("001")).accepted);
  Term stream = L("def M = x M ; root M");
  EXPECT_TRUE(check_labc(stream, F("001")).accepted);
  EXPECT_FALSE(check_labc(stream, F("010")).accepted);
  CheckReport r = check_labc(stream, F("100"));
  EXPECT_EQ(r.reason, "inductive-only loop M =a=> M");
  EXPECT_TRUE(check_labc(L("(\\x. x x) (\\x. x x)"), F("000")).accepted);
  EXPECT_FALSE(check_labc(parse_term("!x"), F("000")).accepted);
}

TEST(LamPrograms, FlagsAndPurity) {
  Program p = parse_program("lam def M = x M ; root M ; flags 001 ;");
  ASSERT_TRUE(p.flags);
  EXPECT_EQ(flags_string(*p.flags), "001");
  EXPECT_TRUE(p.lam);
  EXPECT_THROW(parse_program("lam \\!x. x"), ParseError);
  EXPECT_THROW(parse_program("lam f !x"), ParseError);
}

TEST(LbetaStep, Examples) {
  auto s = lbeta_step(L("(\\x. x) y"), 0, F("000"));
  ASSERT_TRUE(s);
  EXPECT_EQ(print_term(s->first), "y");
  Term omega = L("(\\x. x x) (\\x. x x)");
  s = lbeta_step(omega, 0, F("000"));
  ASSERT_TRUE(s);
  EXPECT_TRUE(graph_bisimilar(s->first, omega));
  Term m = L("x ((\\y. y) z)");
  EXPECT_FALSE(lbeta_step(m, 0, F("001")));
  s = lbeta_step(m, 1, F("001"));
  ASSERT_TRUE(s);
  EXPECT_EQ(print_term(s->first), "x z");
  EXPECT_EQ(path_string(s->second), "a");
}

TEST(LbetaStep, LeftmostOutermost) {
  auto s = lbeta_step(L("(\\x. (\\y. y) x) ((\\z. z) w)"), 0, F("000"));
  ASSERT_TRUE(s);
  EXPECT_EQ(path_string(s->second), "ε");
}

TEST(EmbedGirard, Examples) {
  EXPECT_EQ(print_term(embed_girard(L("\\x. x x"), false)), "\\!x. x !x");
  EXPECT_EQ(print_term(embed_girard(L("x"), true)), "x");
  Term m = embed_girard(L("def M = x M ; root M"), true);
  EXPECT_TRUE(graph_bisimilar(m, parse_term("def M = x #M ; root M")));
  EXPECT_THROW(embed_girard(L("def M = x M ; root M"), false), std::invalid_argument);
}

TEST(EmbedCbv, Examples) {
  EXPECT_EQ(print_term(embed_cbv(L("x"), false, false)), "x");
  EXPECT_EQ(print_term(embed_cbv(L("\\x. x"), false, false)), "\\!x. !x");
  EXPECT_TRUE(graph_bisimilar(embed_cbv(L("y z"), false, false), parse_term("(\\!w. w) (y !z)")));
}

TEST(EmbeddingsAreWellFormed, Random) {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 200; ++i) {
    bool a = i % 2 == 1;
    Term m = i % 4 < 2 ? random_pure_term(rng, 20, {"x", "y"})
                       : random_regular_pure_term(rng, 20, {"x", "y"}, {false, false, a});
    if (!check_labc(m, {false, false, a}).accepted) continue;
    Term e = embed_girard(m, a);
    EXPECT_TRUE(check_llinf(embedding_env(e, a), e).accepted) << print_program(m);
    if (check_labc(m, {a, false, a}).accepted) {
      Term c = embed_cbv(m, a, a);
      EXPECT_TRUE(check_llinf(embedding_env(c, a), c).accepted) << print_program(m);
    }
  }
}

TEST(SimulateCheck, Examples) {
  EXPECT_TRUE(simulate_check(L("(\\x. x) y"), false, 1).passed);
  SimulationReport r = simulate_check(L("(\\x. x x) (\\x. x x)"), false, 5);
  EXPECT_TRUE(r.passed) << r.failure;
  EXPECT_EQ(r.steps, 5u);
  r = simulate_check(L("def M = x ((\\y. y) M) ; root M"), true, 3);
  EXPECT_TRUE(r.passed) << r.failure;
  EXPECT_EQ(r.steps, 3u);
}

TEST(SimulateCheck, RandomTerms) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 60; ++i) {
    Term m = random_pure_term(rng, 20, {"x", "y"});
    SimulationReport r = simulate_check(m, false, 10);
    EXPECT_TRUE(r.passed) << print_program(m) << ": " << r.failure;
  }
  int regular = 0;
  while (regular < 10) {
    Term m = random_regular_pure_term(rng, 20, {"x"}, {false, false, true});
    if (!has_redex(m) || !is_cyclic(m)) continue;
    ++regular;
    SimulationReport r = simulate_check(m, true, 10);
    EXPECT_TRUE(r.passed) << print_program(m) << ": " << r.failure;
  }
}

TEST(SubstitutionCommutes, Random) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 100; ++i) {
    bool a = i % 2 == 1;
    Term m = random_pure_term(rng, 16, {"x", "y"});
    Term n = random_pure_term(rng, 10, {"y"});
    Term lhs = embed_girard(substitute(m, "x", n), a);
    Term rhs = substitute(embed_girard(m, a), "x", embed_girard(n, a));
    EXPECT_TRUE(graph_bisimilar(lhs, rhs)) << print_term(m) << " / " << print_term(n);
  }
}

TEST(SimulateCbv, TwoStepsPerStep) {
  for (bool k : {false, true}) {
    SimulationReport r = simulate_cbv_check(L("(\\x. x x) (\\x. x x)"), k, k, 4);
    EXPECT_TRUE(r.passed) << r.failure;
    EXPECT_EQ(r.target_steps, 2 * r.steps);
  }
  std::mt19937_64 rng(3);
  for (int i = 0; i < 60; ++i) {
    Term m = random_pure_term(rng, 20, {"x", "y"});
    SimulationReport r = simulate_cbv_check(m, false, false, 6);
    EXPECT_TRUE(r.passed) << print_term(m) << ": " << r.failure;
    EXPECT_EQ(r.target_steps, 2 * r.steps);
  }
}

TEST(SimulateCbv, MixedKindsDeadlock) {
  // with a != b the identity meets a box of the other kind
  SimulationReport r = simulate_cbv_check(L("(\\x. x) y"), false, true, 1);
  EXPECT_FALSE(r.passed);
  EXPECT_NE(r.failure.find("deadlock"), std::string::npos);
}
