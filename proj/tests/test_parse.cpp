#include <gtest/gtest.h>

#include "llinf/parse.hpp"
#include "llinf/print.hpp"

using namespace llinf;

namespace {

ParseErrorKind error_kind(const std::string& src) {
  try {
    parse_program(src);
  } catch (const ParseError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for " << src;
  return ParseErrorKind::Syntax;
}

}  // namespace

TEST(Parse, CyclicDefinition) {
  Term m = parse_term("def M = y #M ; root M");
  const Node& root = m.at(m.root);
  ASSERT_EQ(root.tag, Tag::App);
  EXPECT_EQ(m.at(root.a).tag, Tag::Free);
  EXPECT_EQ(m.at(root.a).name, "y");
  const Node& box = m.at(root.b);
  ASSERT_EQ(box.tag, Tag::Box);
  EXPECT_EQ(box.mode, Mode::Coind);
  EXPECT_EQ(box.a, m.root);
}

TEST(Parse, Identity) {
  Term m = parse_term("def I = \\x. x ; root I");
  ASSERT_EQ(m.at(m.root).tag, Tag::Lam);
  EXPECT_EQ(m.at(m.at(m.root).a).tag, Tag::Bound);
  EXPECT_EQ(m.size(), 2u);
}

TEST(Parse, Errors) {
  EXPECT_EQ(error_kind("def X = X"), ParseErrorKind::Guardedness);
  EXPECT_EQ(error_kind("def X = Y ; def Y = (X) ; root X"), ParseErrorKind::Guardedness);
  EXPECT_EQ(error_kind("def A = y ; def B = \\y. A ; root B"), ParseErrorKind::Capture);
  EXPECT_EQ(error_kind("def A = x ; def A = y ; root A"), ParseErrorKind::Duplicate);
  EXPECT_EQ(error_kind("def A = x ; root B"), ParseErrorKind::Missing);
  EXPECT_EQ(error_kind("def A = x ;"), ParseErrorKind::Missing);
  EXPECT_EQ(error_kind("\\x x"), ParseErrorKind::Syntax);
  EXPECT_EQ(error_kind("(x"), ParseErrorKind::Syntax);
}

TEST(Parse, GuardednessMessageListsCycle) {
  try {
    parse_program("def X = X");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("X -> X"), std::string::npos);
    EXPECT_EQ(e.line(), 1);
  }
}

TEST(Parse, CaptureReportsLocation) {
  try {
    parse_program("def A = y ;\ndef B = \\y.  A ; root B");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.col(), 14);
    EXPECT_NE(std::string(e.what()).find("'y'"), std::string::npos);
  }
}

TEST(Parse, BinderShadowsDefinition) {
  Term m = parse_term("def A = z ; def B = \\A. A ; root B");
  EXPECT_EQ(print_term(m), "def B = \\A. A ;\nroot B ;\n");
}

TEST(Parse, Grammar) {
  Term m = parse_term("f x y");
  EXPECT_EQ(print_term(m), "f x y");
  EXPECT_EQ(print_term(parse_term("f (x y)")), "f (x y)");
  EXPECT_EQ(print_term(parse_term("\\x. x \\y. y")), "\\x. x (\\y. y)");
  EXPECT_EQ(print_term(parse_term("!x y")), "!x y");
  EXPECT_EQ(print_term(parse_term("!(x y)")), "!(x y)");
  EXPECT_EQ(print_term(parse_term("(\\!x. x) #<cut>")), "(\\!x. x) #<cut>");
  EXPECT_EQ(print_term(parse_term("λx. ↑x ↓x")), "\\x. #x !x");
  EXPECT_EQ(print_term(parse_term("// comment\nx // trailing\n")), "x");
}

TEST(Parse, AliasResolves) {
  Term m = parse_term("def A = B ; def B = y #A ; root A");
  EXPECT_TRUE(graph_bisimilar(m, parse_term("def M = y #M ; root M")));
}

TEST(Parse, LamFileWithFlags) {
  Program p = parse_program("lam def M = \\x. M ; root M ; flags 100 ;");
  EXPECT_TRUE(p.lam);
  ASSERT_TRUE(p.flags);
  EXPECT_EQ(flags_string(*p.flags), "100");
  EXPECT_EQ(error_kind("flags 12 ; x"), ParseErrorKind::Syntax);
}
