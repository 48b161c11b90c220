#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "llinf/metrics.hpp"
#include "llinf/parse.hpp"
#include "llinf/properties.hpp"
#include "oracles.hpp"

using namespace llinf;
using testing_support::Oracle;
using testing_support::oracle_metric;

namespace {

Term P(const std::string& s) { return parse_term(s); }

const std::string fix = "def M = \\#x. \\y. \\#z. y #(x #x z #z) ; def X = M #M ; ";

}  // namespace

TEST(Size, Examples) {
  EXPECT_EQ(size_at(P("\\x. x"), 0), 2u);
  EXPECT_EQ(size_at(P("#(\\x. x)"), 0), 0u);
  EXPECT_EQ(size_at(P("#(\\x. x)"), 1), 2u);
  EXPECT_EQ(size_at(P("f !x"), 0), 4u);  // app +1, box +1, two variables
  EXPECT_EQ(size_at(P("def M = y #M ; root M"), 0), 2u);
  EXPECT_EQ(size_at(P("def M = y #M ; root M"), 2), 2u);
}

TEST(Weight, Examples) {
  EXPECT_EQ(wei(P("\\x. x"), 5, 0), 2u);
  EXPECT_EQ(wei(P("!(\\x. x)"), 3, 0), 6u);
  EXPECT_EQ(wei(P("#(f (\\x. x) !y)"), 7, 0), 0u);
  EXPECT_EQ(wei(P("#(!(\\x. x))"), 3, 1), 6u);
  EXPECT_EQ(wei(P("!(!x)"), 0, 0), 0u);  // degenerate n
}

TEST(Df, Examples) {
  EXPECT_EQ(df(P("\\x. x"), 0), 1u);
  EXPECT_EQ(df(P("\\!x. x x x"), 0), 3u);
  EXPECT_EQ(df(P("#(\\!x. x x x)"), 0), 1u);
  EXPECT_EQ(df(P("#(\\!x. x x x)"), 1), 3u);
  EXPECT_EQ(df(P("\\!x. !x"), 0), 1u);
}

TEST(Twei, Examples) {
  EXPECT_EQ(twei(P("\\x. x"), 0), 2u);
  EXPECT_EQ(twei(P("#(\\x. x)"), 0), 0u);
  EXPECT_EQ(twei(P("\\!x. !x"), 0), 2u);
  // df 2 multiplies the boxed argument
  EXPECT_EQ(twei(P("(\\!x. x x) !(\\y. y)"), 0), 3u + 2u * 2u);
  auto rows = metric_table(P("\\x. x"), 0, 2);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].twei, 2u);
  EXPECT_EQ(rows[1].size, 0u);
}

TEST(Metrics, BudgetOnIllFormed) {
  // an inductive-only loop has no finite projection
  EXPECT_THROW(size_at(P("def N = N (\\x. x) ; root N"), 0, 5000), BudgetExceeded);
}

TEST(Metrics, AgreeWithGraphOracle) {
  std::mt19937_64 rng(20240611);
  GenOptions opt;
  for (int i = 0; i < 150; ++i) {
    Generated g = random_wellformed(rng, opt);
    for (std::size_t d = 0; d <= 3; ++d) {
      std::uint64_t f = df(g.term, d);
      ASSERT_EQ(size_at(g.term, d), oracle_metric(g.term, d, Oracle::Size)) << print_program(g.term);
      ASSERT_EQ(f, oracle_metric(g.term, d, Oracle::Dup)) << print_program(g.term);
      ASSERT_EQ(wei(g.term, f, d), oracle_metric(g.term, d, Oracle::Weight, f)) << print_program(g.term);
      ASSERT_EQ(wei(g.term, 3, d), oracle_metric(g.term, d, Oracle::Weight, 3)) << print_program(g.term);
    }
  }
}

TEST(WeightTrace, FixpointRun) {
  WeightTrace tr = weight_trace(P(fix + "def T = X n #n ; root T"), 2, lbl_strategy(2));
  EXPECT_EQ(tr.verdict, TraceVerdict::Pass) << tr.reason;
  ASSERT_EQ(tr.rows.size(), 10u);  // three unrolling steps per depth
  EXPECT_EQ(tr.rows[9].step->depth, 2u);
  EXPECT_LT(tr.rows[3].twei[0], tr.rows[0].twei[0]);
  tr = weight_trace(P(fix + "def N = \\#w. \\z. z ; def T = X N #N ; root T"), 2, lbl_strategy(2));
  EXPECT_EQ(tr.verdict, TraceVerdict::Pass) << tr.reason;
  EXPECT_GT(tr.rows.size(), 1u);
}

TEST(WeightTrace, NormalAndRejected) {
  WeightTrace tr = weight_trace(P("\\x. x"), 2, lbl_strategy(2));
  EXPECT_EQ(tr.verdict, TraceVerdict::Pass);
  EXPECT_EQ(tr.rows.size(), 1u);
  tr = weight_trace(P("(\\!x. x !x) !(\\!x. x !x)"), 2, lbl_strategy(2));
  EXPECT_EQ(tr.verdict, TraceVerdict::NotApplicable);
  EXPECT_TRUE(tr.rows.empty());
}

TEST(WeightLaws, RandomSteps) {
  PropertyReport rep = weight_laws(7, 150);
  EXPECT_TRUE(rep.ok()) << rep.failures.front();
}

// Longest reduction sequence using only depth-n steps, by exhaustive search.
static std::size_t longest_depth_n(const Term& m, std::size_t n, std::size_t& budget) {
  if (budget == 0) throw BudgetExceeded(0);
  --budget;
  std::size_t best = 0;
  for (const Redex& r : redexes_upto(m, n))
    if (r.depth() == n) best = std::max(best, 1 + longest_depth_n(contract(m, r), n, budget));
  return best;
}

TEST(WeightLaws, StepCountBound) {
  std::mt19937_64 rng(99);
  GenOptions opt;
  opt.max_nodes = 16;
  std::size_t explored = 0;
  for (int i = 0; i < 80; ++i) {
    Generated g = random_wellformed(rng, opt);
    for (std::size_t n = 0; n <= 1; ++n) {
      std::size_t budget = 3000;
      try {
        std::size_t len = longest_depth_n(g.term, n, budget);
        EXPECT_LE(len, twei(g.term, n)) << print_program(g.term);
        ++explored;
      } catch (const BudgetExceeded&) {
      }
    }
  }
  EXPECT_GT(explored, 100u);
}
