#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "test_support.hpp"

using namespace sdp;

namespace {

Corpus tiny_corpus() { return {fixtures::three_token_graph(), fixtures::analysts_graph()}; }

PointerModel tiny_model(std::uint64_t seed = 1) {
  return PointerModel(fixtures::tiny_config(seed), build_vocabularies(tiny_corpus()));
}

void zero_all(PointerModel& m) {
  for (auto& p : m.parameters()) p.value.setZero();
}

Vector elu(const Vector& x) { return x.unaryExpr([](double v) { return v > 0 ? v : std::expm1(v); }); }

}  // namespace

TEST(Vocabularies, UnknownSlotAndSingletons) {
  const auto v = build_vocabularies(tiny_corpus());
  EXPECT_EQ(v.words.id("never-seen"), 0);
  EXPECT_GT(v.words.id("chase"), 0);
  EXPECT_TRUE(v.singleton_words.contains(v.words.id("chase")));
  // ROOT is never a labeler class.
  EXPECT_EQ(v.label_id("ROOT"), -1);
  EXPECT_EQ(v.labels, (std::vector<std::string>{"ARG1", "ARG2", "BV", "poss"}));
}

TEST(PointerModel, ShapesAndDeterminism) {
  const auto g = fixtures::analysts_graph();
  const PointerModel a = tiny_model(3), b = tiny_model(3), c = tiny_model(4);
  for (std::size_t k = 0; k < a.parameters().size(); ++k) {
    EXPECT_EQ(a.param(k).value, b.param(k).value);
  }
  EXPECT_NE(a.param(a.arc_w).value, c.param(c.arc_w).value);

  Tape tape(a.parameters().size());
  SentenceScorer s(a, tape, g.sentence());
  ASSERT_EQ(s.states().size(), 11u);
  for (Var h : s.states()) EXPECT_EQ(tape.value(h).size(), 2 * 4);
  const auto step = s.step(1, std::nullopt, s.initial_state());
  EXPECT_EQ(tape.value(step.scores).size(), 11);
  EXPECT_EQ(tape.value(step.hidden).size(), 5);
  EXPECT_EQ(tape.value(s.label_scores(step.hidden, 4)).size(), 4);

  Tape tape2(b.parameters().size());
  SentenceScorer s2(b, tape2, g.sentence());
  const auto step2 = s2.step(1, std::nullopt, s2.initial_state());
  EXPECT_EQ(tape.value(step.scores), tape2.value(step2.scores));
}

TEST(PointerModel, ZeroParametersGiveUniformScores) {
  PointerModel m = tiny_model();
  zero_all(m);
  const auto g = fixtures::analysts_graph();
  Tape tape(m.parameters().size());
  SentenceScorer s(m, tape, g.sentence());
  for (Var h : s.states()) EXPECT_TRUE(tape.value(h).isZero(0.0));
  const auto step = s.step(4, 0, s.initial_state());
  EXPECT_TRUE(tape.value(step.scores).isZero(0.0));
  // Pointer steps each cost ln(n+1), labelled steps ln(L).
  const double n = 10, m_arcs = 7, labelled = 6, L = 4;
  EXPECT_NEAR(fixtures::loss_value(m, g), (n + m_arcs) * std::log(n + 1) + labelled * std::log(L), 1e-12);
}

TEST(PointerModel, BiasOnlyLstmFixedPoint) {
  PointerModel m = tiny_model();
  zero_all(m);
  const auto& cell = m.encoder_forward[0];
  const int h = cell.hidden;
  const double bi = 0.3, bf = -0.7, bg = 0.9, bo = -0.2;
  Matrix& b = m.parameters()[cell.b].value;
  b.block(0, 0, h, 1).setConstant(bi);
  b.block(h, 0, h, 1).setConstant(bf);
  b.block(2 * h, 0, h, 1).setConstant(bg);
  b.block(3 * h, 0, h, 1).setConstant(bo);
  auto sigma = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
  const double c1 = sigma(bi) * std::tanh(bg);
  const double h1 = sigma(bo) * std::tanh(c1);
  const double c2 = sigma(bf) * c1 + sigma(bi) * std::tanh(bg);
  const double h2 = sigma(bo) * std::tanh(c2);

  Tape tape(m.parameters().size());
  SentenceScorer s(m, tape, fixtures::three_token_graph().sentence());
  const Vector& first = tape.value(s.state(1));
  const Vector& second = tape.value(s.state(2));
  for (int k = 0; k < h; ++k) {
    EXPECT_NEAR(first(k), h1, 1e-15);
    EXPECT_NEAR(second(k), h2, 1e-15);
    EXPECT_EQ(first(h + k), 0.0);  // backward direction has zero bias
  }
}

TEST(PointerModel, BiaffineMatchesDirectComputation) {
  const PointerModel m = tiny_model(9);
  const auto g = fixtures::analysts_graph();
  Tape tape(m.parameters().size());
  SentenceScorer s(m, tape, g.sentence());
  auto st = s.step(2, std::nullopt, s.initial_state());
  st = s.step(2, 1, st.next);  // second step: input is h_2 + h_1
  EXPECT_TRUE(tape.value(st.input).isApprox(tape.value(s.state(2)) + tape.value(s.state(1))));

  auto P = [&](std::size_t k) -> const Matrix& { return m.param(k).value; };
  const Vector& hidden = tape.value(st.hidden);
  const Vector f1 = elu(P(m.arc_head_mlp.w) * hidden + P(m.arc_head_mlp.b));
  const Vector g1 = elu(P(m.label_head_mlp.w) * hidden + P(m.label_head_mlp.b));
  const Vector& scores = tape.value(st.scores);
  for (Position j = 0; j <= 10; ++j) {
    const Vector& hj = tape.value(s.state(j));
    const Vector f2 = elu(P(m.arc_dep_mlp.w) * hj + P(m.arc_dep_mlp.b));
    const double v = f1.dot(P(m.arc_w) * f2) + P(m.arc_u).row(0).dot(f1) + P(m.arc_v).row(0).dot(f2) +
                     P(m.arc_b)(0, 0);
    EXPECT_NEAR(scores(j), v, 1e-12) << j;
  }
  const Vector& hp = tape.value(s.state(4));
  const Vector g2 = elu(P(m.label_dep_mlp.w) * hp + P(m.label_dep_mlp.b));
  const Vector& labels = tape.value(s.label_scores(st.hidden, 4));
  const int d = m.config().label_mlp_size;
  for (Eigen::Index l = 0; l < labels.size(); ++l) {
    const Matrix Wl = P(m.label_w).block(l * d, 0, d, d);
    const double v = g1.dot(Wl * g2) + P(m.label_u).row(l).dot(g1) + P(m.label_v).row(l).dot(g2) +
                     P(m.label_b)(l, 0);
    EXPECT_NEAR(labels(l), v, 1e-12) << l;
  }
}

TEST(PointerModel, GradientsMatchFiniteDifferences) {
  PointerModel m(fixtures::tiny_config(5), build_vocabularies({fixtures::three_token_graph()}));
  const auto r = fixtures::check_gradients(m, fixtures::three_token_graph());
  EXPECT_GT(r.entries, 300u);
  EXPECT_LT(r.max_relative_error, 1e-3) << r.worst;
}

TEST(PointerModel, SaveLoadRoundTrip) {
  const PointerModel m = tiny_model(2);
  std::stringstream buf;
  m.save(buf);
  const PointerModel back = PointerModel::load(buf);
  ASSERT_EQ(back.parameters().size(), m.parameters().size());
  for (std::size_t k = 0; k < m.parameters().size(); ++k) EXPECT_EQ(back.param(k).value, m.param(k).value);
  EXPECT_EQ(back.vocab().labels, m.vocab().labels);
  EXPECT_EQ(fixtures::loss_value(back, fixtures::analysts_graph()), fixtures::loss_value(m, fixtures::analysts_graph()));
  std::istringstream junk("{\"format\":\"other\"}");
  EXPECT_THROW(PointerModel::load(junk), std::runtime_error);
}

TEST(PointerModel, ExternalVectors) {
  auto cfg = fixtures::tiny_config();
  cfg.external_dim = 3;
  const PointerModel m(cfg, build_vocabularies(tiny_corpus()));
  const auto g = fixtures::three_token_graph();
  std::vector<Vector> ext(3, Vector::Zero(3));
  Tape tape(m.parameters().size());
  EXPECT_THROW(SentenceScorer(m, tape, g.sentence()), ShapeError);
  EXPECT_THROW(SentenceScorer(m, tape, g.sentence(), std::vector<Vector>(2, Vector::Zero(3))), ShapeError);
  EXPECT_THROW(SentenceScorer(m, tape, g.sentence(), std::vector<Vector>(3, Vector::Zero(2))), ShapeError);
  const double base = fixtures::loss_value(m, g, ext);
  ext[1](0) = 2.0;
  EXPECT_NE(fixtures::loss_value(m, g, ext), base);

  const PointerModel plain = tiny_model();
  Tape t2(plain.parameters().size());
  EXPECT_THROW(SentenceScorer(plain, t2, g.sentence(), ext), ShapeError);
}

TEST(PointerModel, ExternalVectorsFile) {
  const Corpus corpus = {fixtures::three_token_graph()};
  std::istringstream ok("1 2\n3 4\n5 6\n\n");
  const auto v = read_external_embeddings(ok, corpus, 2);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0][2](1), 6.0);
  std::istringstream short_sentence("1 2\n3 4\n\n");
  EXPECT_THROW(read_external_embeddings(short_sentence, corpus, 2), ShapeError);
  std::istringstream wrong_dim("1 2\n3 4 5\n5 6\n");
  EXPECT_THROW(read_external_embeddings(wrong_dim, corpus, 2), ShapeError);
}

TEST(Training, ZeroLearningRateKeepsParameters) {
  auto cfg = fixtures::tiny_config();
  cfg.learning_rate = 0;
  cfg.epochs = 2;
  cfg.embedding_dropout = 0.33;
  cfg.unk_replacement = 0.5;
  const Corpus corpus = tiny_corpus();
  const auto result = train(corpus, cfg);
  const PointerModel fresh(cfg, build_vocabularies(corpus));
  for (std::size_t k = 0; k < fresh.parameters().size(); ++k) {
    EXPECT_EQ(result.model.param(k).value, fresh.param(k).value) << fresh.param(k).name;
  }
}

TEST(Training, DeterministicAndLossDecreases) {
  auto cfg = fixtures::tiny_config();
  cfg.epochs = 10;
  cfg.learning_rate = 0.01;
  cfg.batch_size = 2;
  SynthOptions so;
  so.sentences = 8;
  so.min_length = 4;
  so.max_length = 8;
  so.arc_ratio = 0.8;
  so.seed = 4;
  const Corpus corpus = synth_corpus(so);
  const auto a = train(corpus, cfg);
  const auto b = train(corpus, cfg);
  ASSERT_EQ(a.history.size(), 10u);
  for (std::size_t k = 0; k < a.history.size(); ++k) EXPECT_EQ(a.history[k].loss, b.history[k].loss);
  EXPECT_LT(a.history.back().loss, a.history.front().loss);
  for (std::size_t k = 1; k < a.history.size(); ++k) EXPECT_LT(a.history[k].loss, a.history[k - 1].loss) << k;
}

TEST(Training, DecaysLearningRateWhenDevStalls) {
  auto cfg = fixtures::tiny_config();
  cfg.epochs = 3;
  cfg.learning_rate = 1e-12;  // too small to change dev LF1
  cfg.decay_patience = 1;
  cfg.decay_rate = 0.5;
  const Corpus corpus = tiny_corpus();
  TrainOptions opt;
  opt.dev = &corpus;
  const auto r = train(corpus, cfg, opt);
  ASSERT_EQ(r.history.size(), 3u);
  EXPECT_EQ(r.best_epoch, 1);
  EXPECT_EQ(r.history[0].learning_rate, 1e-12);
  EXPECT_EQ(r.history[1].learning_rate, 1e-12);
  EXPECT_EQ(r.history[2].learning_rate, 0.5e-12);
}

TEST(Training, ClipGlobalNorm) {
  std::vector<Matrix> g = {Matrix::Constant(2, 2, 3.0), Matrix::Constant(1, 1, 4.0)};
  const double before = clip_global_norm(g, 5.0);
  EXPECT_NEAR(before, std::sqrt(4 * 9.0 + 16.0), 1e-12);
  double sq = 0;
  for (const auto& m : g) sq += m.squaredNorm();
  EXPECT_NEAR(std::sqrt(sq), 5.0, 1e-12);
  std::vector<Matrix> small = {Matrix::Constant(1, 1, 1.0)};
  clip_global_norm(small, 5.0);
  EXPECT_EQ(small[0](0, 0), 1.0);
}
