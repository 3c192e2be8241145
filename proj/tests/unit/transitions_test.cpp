#include <gtest/gtest.h>

#include <sstream>

#include "test_support.hpp"

using namespace sdp;

namespace {

Transition S() { return Transition::shift(); }
Transition A(Position p, const std::string& l) { return Transition::attach(p, l); }

}  // namespace

TEST(Oracle, AnalystsSentenceSequence) {
  const auto g = fixtures::analysts_graph();
  const TransitionSequence expected = {
      S(), A(1, "BV"), A(4, "ARG1"), S(), S(), A(0, "ROOT"), A(6, "ARG1"), S(), A(4, "ARG2"),
      S(), S(),        S(),          S(), A(6, "ARG2"),      A(7, "poss"), S(), S(),
  };
  const auto seq = oracle(g);
  ASSERT_EQ(seq.size(), 17u);
  EXPECT_EQ(seq, expected);
  EXPECT_EQ(replay(g.sentence(), seq), g);
}

TEST(Oracle, EmptyGraphIsAllShifts) {
  const SemanticGraph g(Sentence::from_forms({"a", "b", "c"}));
  EXPECT_EQ(oracle(g), TransitionSequence(3, S()));
}

TEST(Oracle, LengthAndRoundTripOnRandomDags) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + rng() % 30;
    const auto g = fixtures::random_dag(rng, n, 1.5 * static_cast<double>(rng() % 1001) / 1000.0);
    const auto seq = oracle(g);
    ASSERT_EQ(seq.size(), n + g.arc_count());
    ASSERT_EQ(replay(g.sentence(), seq), g);
  }
}

TEST(Configuration, AttachLegality) {
  Configuration c(Sentence::from_forms({"a", "b", "c"}));
  EXPECT_EQ(c.focus(), 1);
  EXPECT_FALSE(c.can_attach(1));
  EXPECT_FALSE(c.can_attach(4));
  EXPECT_FALSE(c.can_attach(-1));
  c.apply(A(2, "X"));
  EXPECT_EQ(c.last_head(), std::optional<Position>(2));
  EXPECT_FALSE(c.can_attach(2));  // duplicate
  c.apply(S());
  EXPECT_FALSE(c.last_head().has_value());
  EXPECT_FALSE(c.can_attach(1));  // 2 -> 1 exists, so 1 -> 2 closes a cycle
  EXPECT_TRUE(c.can_attach(3));
  c.apply(A(3, "X"));
  c.apply(S());
  EXPECT_FALSE(c.can_attach(1));  // 3 -> 2 -> 1
  EXPECT_FALSE(c.can_attach(2));
  EXPECT_TRUE(c.can_attach(0));
  EXPECT_THROW(c.apply(A(1, "X")), ContractViolation);
  c.apply(S());
  EXPECT_TRUE(c.is_terminal());
  EXPECT_FALSE(c.is_legal(S()));
  EXPECT_THROW(c.apply(S()), ContractViolation);
}

TEST(Configuration, ShiftAlwaysLegalAndCycleCheckMatchesClosure) {
  // Random legal walks: every Attach the configuration allows must keep the
  // graph acyclic, and every one it refuses must be a duplicate or a cycle.
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 12;
    Configuration c(Sentence::from_forms(std::vector<std::string>(n, "w")));
    fixtures::Closure closure(n + 1);
    while (!c.is_terminal()) {
      ASSERT_TRUE(c.is_legal(S()));
      const auto i = static_cast<std::size_t>(c.focus());
      for (std::size_t p = 0; p <= n; ++p) {
        if (p == i) continue;
        const bool expected =
            !c.built().has_arc(static_cast<Position>(p), static_cast<Position>(i)) && !closure.reaches(i, p);
        ASSERT_EQ(c.can_attach(static_cast<Position>(p)), expected);
      }
      if (rng() % 3 == 0) {
        c.apply(S());
        continue;
      }
      const auto p = static_cast<Position>(rng() % (n + 1));
      if (c.can_attach(p)) {
        c.apply(A(p, p == 0 ? "ROOT" : "L"));
        closure.add(static_cast<std::size_t>(p), i);
      }
    }
    EXPECT_TRUE(is_acyclic(c.built()));
  }
}

TEST(Replay, ReportsOffendingStep) {
  const auto s = Sentence::from_forms({"a", "b"});
  try {
    replay(s, {A(2, "X"), S(), A(1, "X")});
    FAIL();
  } catch (const IllegalTransition& e) {
    EXPECT_EQ(e.index(), 2u);
  }
  try {
    replay(s, {S()});
    FAIL();
  } catch (const IllegalTransition& e) {
    EXPECT_EQ(e.index(), 1u);
  }
  try {
    replay(s, {S(), S(), S()});
    FAIL();
  } catch (const IllegalTransition& e) {
    EXPECT_EQ(e.index(), 2u);
  }
}

TEST(Transitions, TextRoundTrip) {
  const auto seq = oracle(fixtures::analysts_graph());
  std::stringstream buf;
  write_transitions(seq, buf);
  write_transitions({}, buf);
  write_transitions(seq, buf);
  const auto back = read_transitions(buf);
  ASSERT_EQ(back.size(), 2u);  // an empty sequence is just a blank line
  EXPECT_EQ(back[0], seq);
  EXPECT_EQ(back[1], seq);
  EXPECT_EQ(to_string(seq[1]), "ATTACH 1 BV");
  EXPECT_EQ(to_string(seq[0]), "SHIFT");
}
