#include <gtest/gtest.h>

#include <random>

#include "llinf/parse.hpp"
#include "llinf/print.hpp"
#include "llinf/term.hpp"
#include "support.hpp"

using namespace llinf;

namespace {

Term P(const std::string& s) { return parse_term(s); }

}  // namespace

TEST(Project, CyclicCoinductiveStream) {
  Term m = P("def M = y #M ; root M");
  EXPECT_EQ(print_term(project_depth(m, 1)), "y #(y #<cut>)");
  EXPECT_EQ(print_term(project_depth(m, 0)), "y #<cut>");
}

TEST(Project, RootCoinductiveBoxAtDepthZero) {
  EXPECT_EQ(print_term(project_depth(P("#(\\x. x)"), 0)), "#<cut>");
}

TEST(Project, IllFormedHitsBudget) {
  EXPECT_THROW(project_depth(P("def N = N (\\x. x) ; root N"), 0, 10000), BudgetExceeded);
}

TEST(Unfold, HeightBounds) {
  Term m = P("def M = y #M ; root M");
  EXPECT_EQ(print_term(unfold_height(m, 2)), "y #<cut>");
  Term id = P("\\x. x");
  Term u = unfold_height(id, 10);
  EXPECT_FALSE(has_cut(u));
  EXPECT_TRUE(graph_bisimilar(u, id));
  // The ill-formed N = N (\x.x) still unfolds to every finite height.
  Term rho = unfold_height(P("def N = N (\\x. x) ; root N"), 3);
  EXPECT_EQ(print_term(rho), "<cut> <cut> (\\x. <cut>) (\\x. x)");
}

TEST(Unfold, Coherence) {
  std::mt19937 rng(7);
  for (const char* src : {"def M = y #M ; root M", "def N = N (\\x. x) ; root N",
                          "def K = \\#x. \\#y. x ; def I = \\#x. x ; def A = K #B #K ; def B = K #A #I ; root A"}) {
    Term m = P(src);
    for (std::size_t h = 0; h < 6; ++h) {
      Term small = unfold_height(m, h);
      Term big = unfold_height(m, h + 2);
      EXPECT_TRUE(graph_bisimilar(small, unfold_height(big, h))) << src << " h=" << h;
    }
  }
}

TEST(Equal, DepthAndAlpha) {
  Term m = P("def M = y #M ; root M");
  Term m2 = P("def Q = y #Q ; root Q");
  EXPECT_TRUE(equal_at_depth(m, m2, 5));
  Term l = P("def K = \\#x. \\#y. x ; def I = \\#x. x ; def L = K #L #I ; root L");
  Term p = P("def K = \\#x. \\#y. x ; def P = K #P #K ; root P");
  EXPECT_FALSE(equal_at_depth(l, p, 1));
  EXPECT_TRUE(equal_at_depth(l, p, 0));
  EXPECT_TRUE(equal_at_depth(P("\\x. x"), P("\\y. y"), 0));
}

TEST(Bisimilar, UnfoldingAndBoxKind) {
  Term m = P("def M = y #M ; root M");
  Term unfolded = P("def M = y #(y #M) ; root M");
  EXPECT_TRUE(graph_bisimilar(m, unfolded));
  EXPECT_FALSE(graph_bisimilar(m, P("def M = y #(#M) ; root M")));
  Term m0 = P("\\!x. \\!y. y !(x !x !y)");
  Term m1 = P("\\!x. \\!y. y #(x !x !y)");
  EXPECT_FALSE(graph_bisimilar(m0, m1));
}

TEST(Bisimilar, MinimizeKeepsTree) {
  Term m = P("def A = y #B ; def B = y #A ; root A");
  Term q = minimize(m);
  EXPECT_TRUE(graph_bisimilar(m, q));
  EXPECT_LT(q.size(), m.size());
}

TEST(FreeVars, Basic) {
  EXPECT_EQ(free_vars(P("def M = y #M ; root M")), (std::set<std::string>{"y"}));
  EXPECT_TRUE(free_vars(P("\\x. x")).empty());
  EXPECT_EQ(free_vars(P("\\#x. x z")), (std::set<std::string>{"z"}));
}

TEST(Substitute, Equations) {
  EXPECT_TRUE(graph_bisimilar(substitute(P("x"), "x", P("\\y. y")), P("\\y. y")));
  Term s = substitute(P("def M = y #M ; root M"), "y", P("\\x. x"));
  EXPECT_TRUE(graph_bisimilar(s, P("def M = (\\x. x) #M ; root M")));
  EXPECT_TRUE(graph_bisimilar(substitute(P("\\x. x"), "y", P("z")), P("\\x. x")));
  // no capture: N mentions y, M binds y
  Term c = substitute(P("\\y. x y"), "x", P("y"));
  EXPECT_EQ(print_term(c), "\\y0. y y0");
}

TEST(Substitute, FreeVarLaw) {
  std::mt19937 rng(11);
  for (int i = 0; i < 200; ++i) {
    Term m = testing_support::random_raw_term(rng, 12, {"x", "y", "z"});
    Term n = testing_support::random_raw_term(rng, 6, {"u", "y"});
    auto fm = free_vars(m);
    if (!fm.count("x")) continue;
    auto expected = fm;
    expected.erase("x");
    for (auto& v : free_vars(n)) expected.insert(v);
    EXPECT_EQ(free_vars(substitute(m, "x", n)), expected) << print_term(m);
  }
}

TEST(Substitute, CommutesWithProjection) {
  std::mt19937 rng(5);
  for (int i = 0; i < 100; ++i) {
    Term m = testing_support::random_raw_term(rng, 14, {"x", "y"});
    Term n = testing_support::random_raw_term(rng, 5, {"z"});
    for (std::size_t d = 0; d < 3; ++d) {
      // raw terms may have an infinite depth-d region; those are skipped
      Term base;
      try {
        base = project_depth(m, d, 2000);
        project_depth(n, d, 2000);
      } catch (const BudgetExceeded&) {
        continue;
      }
      Term lhs = project_depth(substitute(m, "x", n), d);
      Term rhs = project_depth(substitute(base, "x", n), d);
      EXPECT_TRUE(graph_bisimilar(lhs, rhs)) << print_term(m) << " d=" << d;
    }
  }
}

TEST(Paths, LevelsAndOrder) {
  Term m = P("f !(#(g x))");
  auto p = parse_path("am");
  ASSERT_TRUE(p);
  EXPECT_EQ(level_of(m, *p), "i");
  EXPECT_EQ(level_of(m, *parse_path("amm")), "ic");
  EXPECT_EQ(level_depth("icic"), 2u);
  EXPECT_TRUE(level_less("", "i"));
  EXPECT_TRUE(level_less("ii", "c"));
  EXPECT_TRUE(level_less("ic", "ci"));
  EXPECT_TRUE(is_proper_prefix("i", "ic"));
  EXPECT_FALSE(is_proper_prefix("ic", "ic"));
  EXPECT_THROW(node_at(m, *parse_path("b")), InvalidPosition);
  EXPECT_EQ(path_string({}), "ε");
}

TEST(Print, RoundTrip) {
  std::mt19937 rng(3);
  for (int i = 0; i < 300; ++i) {
    Term m = testing_support::random_raw_term(rng, 16, {"x", "y"});
    std::string text = print_term(m);
    Term back = parse_term(text);
    EXPECT_TRUE(graph_bisimilar(m, back)) << text;
  }
}

TEST(Print, CyclicProgram) {
  Term m = P("def M = y #M ; root M");
  EXPECT_EQ(print_term(m), "def M = y #M ;\nroot M ;\n");
  Term shared = P("def I = \\x. x ; def A = I I ; root A");
  EXPECT_TRUE(graph_bisimilar(parse_term(print_term(shared)), shared));
}
