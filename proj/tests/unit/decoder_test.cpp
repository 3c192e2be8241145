#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "test_support.hpp"

using namespace sdp;

namespace {

Corpus reference_corpus() { return {fixtures::three_token_graph(), fixtures::analysts_graph()}; }

PointerModel random_model(std::uint64_t seed, double spread = 1.0) {
  PointerModel m(fixtures::tiny_config(seed), build_vocabularies(reference_corpus()));
  std::mt19937_64 rng(seed * 7919 + 1);
  std::normal_distribution<double> noise(0.0, spread);
  for (auto& p : m.parameters()) {
    for (Eigen::Index i = 0; i < p.value.size(); ++i) p.value.data()[i] += noise(rng);
  }
  return m;
}

Sentence random_sentence(std::mt19937_64& rng, std::size_t n) {
  static const std::vector<std::string> pool = {"The", "results", "were", "in", "line", "with", "Cats", "mice", "zzz"};
  std::vector<std::string> forms;
  for (std::size_t k = 0; k < n; ++k) forms.push_back(pool[rng() % pool.size()]);
  return Sentence::from_forms(forms);
}

struct Scored {
  TransitionSequence seq;
  double log_prob;
};

// Every terminal transition sequence of a sentence with its renormalised
// log-probability, by explicit enumeration over legal pointer targets.
std::vector<Scored> enumerate(const PointerModel& m, const Sentence& s) {
  Tape tape;
  SentenceScorer scorer(m, tape, s);
  std::vector<Scored> out;
  std::function<void(Configuration, DecoderState, TransitionSequence, double)> walk =
      [&](Configuration c, DecoderState state, TransitionSequence seq, double lp) {
        if (c.is_terminal()) {
          out.push_back({seq, lp});
          return;
        }
        const auto st = scorer.step(c.focus(), c.last_head(), state);
        const Vector v = tape.value(st.scores);
        std::vector<Position> legal;
        for (Position j = 0; j <= static_cast<Position>(s.size()); ++j) {
          if (j == c.focus() || c.can_attach(j)) legal.push_back(j);
        }
        double z = 0;
        for (Position j : legal) z += std::exp(v(j));
        for (Position j : legal) {
          const Transition t = detail::make_transition(m, scorer, tape, c, st.hidden, j);
          TransitionSequence next = seq;
          next.push_back(t);
          walk(apply(c, t), st.next, next, lp + v(j) - std::log(z));
        }
      };
  walk(Configuration(s), scorer.initial_state(), {}, 0.0);
  return out;
}

}  // namespace

TEST(Decoder, OutputsAreValidGraphs) {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 20; ++k) {
    const PointerModel m = random_model(static_cast<std::uint64_t>(k) + 1, 2.0);
    for (int t = 0; t < 10; ++t) {
      const Sentence s = random_sentence(rng, 1 + rng() % 12);
      for (std::size_t beam : {1u, 3u}) {
        const auto r = parse_sentence(m, s, beam);
        EXPECT_TRUE(is_acyclic(r.graph));
        EXPECT_EQ(r.transitions.size(), s.size() + r.graph.arc_count());
        EXPECT_EQ(replay(s, r.transitions), r.graph);
        EXPECT_LE(r.graph.arc_count(), s.size() * (s.size() + 1) / 2);
      }
    }
  }
}

TEST(Decoder, BeamOneEqualsGreedy) {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 30; ++k) {
    const PointerModel m = random_model(static_cast<std::uint64_t>(k) + 100);
    const Sentence s = random_sentence(rng, 1 + rng() % 15);
    const auto g = parse_greedy(m, s);
    const auto b = parse_beam(m, s, 1);
    EXPECT_EQ(g.transitions, b.transitions);
    EXPECT_EQ(g.graph, b.graph);
    EXPECT_DOUBLE_EQ(g.log_prob, b.log_prob);
  }
}

TEST(Decoder, WideBeamFindsExhaustiveOptimum) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 25; ++k) {
    const PointerModel m = random_model(static_cast<std::uint64_t>(k) + 200, 1.5);
    const Sentence s = random_sentence(rng, 2);
    const auto all = enumerate(m, s);
    ASSERT_GE(all.size(), 5u);
    const auto best = std::max_element(all.begin(), all.end(),
                                       [](const Scored& a, const Scored& b) { return a.log_prob < b.log_prob; });
    double mass = 0;
    for (const auto& x : all) mass += std::exp(x.log_prob);
    EXPECT_NEAR(mass, 1.0, 1e-9);  // renormalised steps give a proper distribution
    const auto r = parse_beam(m, s, all.size());
    EXPECT_NEAR(r.log_prob, best->log_prob, 1e-12);
    EXPECT_EQ(r.transitions, best->seq);
    // Greedy can only be as good or worse.
    EXPECT_LE(parse_greedy(m, s).log_prob, best->log_prob + 1e-12);
  }
}

TEST(Decoder, TiesGoToLowestLegalPosition) {
  // With every parameter zero all legal targets tie, so each step takes the
  // lowest legal position. Used targets drop out of the legal set.
  PointerModel m(fixtures::tiny_config(), build_vocabularies(reference_corpus()));
  for (auto& p : m.parameters()) p.value.setZero();
  const auto s = Sentence::from_forms({"a", "b"});
  const auto r = parse_greedy(m, s);
  const TransitionSequence expected = {Transition::attach(0, "ROOT"), Transition::shift(),
                                       Transition::attach(0, "ROOT"),
                                       Transition::attach(1, m.vocab().labels[0]), Transition::shift()};
  EXPECT_EQ(r.transitions, expected);
}

TEST(Decoder, ParallelCorpusMatchesSerial) {
  std::mt19937_64 rng(4);
  const PointerModel m = random_model(9);
  std::vector<Sentence> sentences;
  for (int k = 0; k < 12; ++k) sentences.push_back(random_sentence(rng, 1 + rng() % 9));
  const auto serial = parse_corpus(m, sentences, 2);
  const auto parallel = parse_corpus(m, sentences, 2, {}, 3);
  ASSERT_EQ(serial.size(), parallel.size());
  for (std::size_t k = 0; k < serial.size(); ++k) EXPECT_EQ(serial[k].transitions, parallel[k].transitions);
}

TEST(Decoder, RejectsZeroBeam) {
  const PointerModel m = random_model(1);
  EXPECT_THROW(parse_beam(m, Sentence::from_forms({"a"}), 0), ContractViolation);
}

TEST(TransitionStats, OracleCountsAndFit) {
  Corpus corpus;
  std::mt19937_64 rng(8);
  for (int k = 0; k < 40; ++k) corpus.push_back(fixtures::random_dag(rng, 2 + rng() % 20, 0.8));
  const auto stats = oracle_transition_stats(corpus);
  ASSERT_EQ(stats.rows.size(), corpus.size());
  std::size_t words = 0, arcs = 0;
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    EXPECT_EQ(stats.rows[k].transitions, corpus[k].size() + corpus[k].arc_count());
    words += corpus[k].size();
    arcs += corpus[k].arc_count();
  }
  EXPECT_DOUBLE_EQ(stats.arcs_per_word, static_cast<double>(arcs) / static_cast<double>(words));
  ASSERT_TRUE(stats.fit.has_value());

  const Corpus empty = {SemanticGraph(Sentence::from_forms({"a", "b"})),
                        SemanticGraph(Sentence::from_forms({"a", "b", "c"}))};
  const auto zero = oracle_transition_stats(empty);
  EXPECT_EQ(zero.singleton_share, 1.0);
  EXPECT_NEAR(zero.fit->slope, 1.0, 1e-12);
  EXPECT_NEAR(zero.fit->intercept, 0.0, 1e-12);
}

TEST(LinearFit, ExactLineAndErrors) {
  const std::vector<double> x = {1, 2, 3, 4}, y = {3, 5, 7, 9};
  const auto f = fit_line(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(f.intercept, 1.0, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  EXPECT_THROW(fit_line(std::vector<double>{1}, std::vector<double>{1}), std::invalid_argument);
  EXPECT_THROW(fit_line(std::vector<double>{2, 2}, std::vector<double>{1, 3}), std::invalid_argument);
}
