#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace sdp;

TEST(Sentence, RejectsNonDensePositions) {
  Token a{1, "a"};
  Token b{3, "b"};
  EXPECT_THROW(Sentence({a, b}), ContractViolation);
}

TEST(Sentence, RejectsEmptyAndTabbedFields) {
  EXPECT_THROW(Sentence::from_forms({""}), ContractViolation);
  EXPECT_THROW(Sentence::from_forms({"a\tb"}), ContractViolation);
}

TEST(Sentence, DecodesUtf8Characters) {
  const Token t{1, "na\xC3\xAFve"};
  const auto chars = t.characters();
  ASSERT_EQ(chars.size(), 5u);
  EXPECT_EQ(chars[2], U'ï');
}

TEST(SemanticGraph, AddArcChecks) {
  SemanticGraph g(Sentence::from_forms({"a", "b", "c"}));
  g.add_arc({1, 2, "X"});
  EXPECT_THROW(g.add_arc({1, 2, "Y"}), ContractViolation);
  EXPECT_THROW(g.add_arc({2, 2, "X"}), ContractViolation);
  EXPECT_THROW(g.add_arc({4, 2, "X"}), ContractViolation);
  EXPECT_THROW(g.add_arc({1, 0, "X"}), ContractViolation);
  EXPECT_THROW(g.add_arc({0, 3, "X"}), ContractViolation);
  EXPECT_THROW(g.add_arc({1, 3, "ROOT"}), ContractViolation);
  EXPECT_THROW(g.add_arc({1, 3, "_"}), ContractViolation);
  EXPECT_THROW(g.add_arc({1, 3, "a b"}), ContractViolation);
  g.add_arc({0, 3, "ROOT"});
  EXPECT_EQ(g.arc_count(), 2u);
  EXPECT_EQ(*g.label(1, 2), "X");
  EXPECT_EQ(g.label(2, 1), nullptr);
}

TEST(SemanticGraph, HeadsAscendingRootFirst) {
  SemanticGraph g(Sentence::from_forms({"a", "b", "c", "d"}));
  g.add_arc({4, 2, "X"});
  g.add_arc({0, 2, "ROOT"});
  g.add_arc({1, 2, "Y"});
  EXPECT_EQ(g.heads_of(2), (std::vector<Position>{0, 1, 4}));
  EXPECT_TRUE(g.heads_of(3).empty());
}

TEST(SemanticGraph, ValidatingConstructorRejectsCycles) {
  const auto s = Sentence::from_forms({"a", "b", "c"});
  EXPECT_NO_THROW(SemanticGraph(s, {{1, 2, "X"}, {2, 3, "X"}}));
  EXPECT_THROW(SemanticGraph(s, {{1, 2, "X"}, {2, 3, "X"}, {3, 1, "X"}}), ContractViolation);
}

TEST(SemanticGraph, SingletonsAndAcyclicity) {
  const auto g = fixtures::analysts_graph();
  EXPECT_TRUE(is_acyclic(g));
  // Words 3, 8 and 10 take part in no arc.
  EXPECT_EQ(singleton_count(g), 3u);
}
