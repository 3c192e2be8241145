#pragma once

/*! \file
 *  \brief Pointer scorer and arc labeler.
 *
 *  Encoder: each word is the concatenation of a character CNN vector (one
 *  convolution + max pooling), word, lemma and POS embeddings, plus an
 *  optional externally supplied contextual vector. A stack of BiLSTM layers
 *  produces h_1..h_n; a learned vector h_0 stands for ROOT.
 *
 *  Decoder: at every transition step the input is r = h_focus + h_lasthead
 *  (h_lasthead is zero before the focus word receives a head). An LSTM whose
 *  state runs across all steps of one sentence yields s_t, and the pointer
 *  scores every position j with the biaffine function
 *
 *      v_j = f1(s_t)^T W f2(h_j) + U^T f1(s_t) + V^T f2(h_j) + b
 *
 *  where f1, f2 are single-layer ELU perceptrons. The labeler applies one such
 *  biaffine per label to (g1(s_t), g2(h_p)). ROOT arcs always carry the
 *  reserved ROOT label, so the labeler only sees arcs between words.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sdp/graph.hpp"
#include "sdp/model_config.hpp"
#include "sdp/nn/tape.hpp"
#include "sdp/transitions.hpp"

namespace sdp {

using nn::Matrix;
using nn::Parameter;
using nn::Tape;
using nn::Var;
using nn::Vector;

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Symbol table with id 0 reserved for unknown symbols.
template <typename Key>
class Vocabulary {
 public:
  static constexpr int kUnknown = 0;

  Vocabulary() : symbols_(1) {}

  int add(const Key& key) {
    const auto [it, inserted] = ids_.emplace(key, static_cast<int>(symbols_.size()));
    if (inserted) symbols_.push_back(key);
    return it->second;
  }

  int id(const Key& key) const {
    const auto it = ids_.find(key);
    return it == ids_.end() ? kUnknown : it->second;
  }

  bool contains(const Key& key) const { return ids_.contains(key); }
  std::size_t size() const { return symbols_.size(); }
  const std::vector<Key>& symbols() const { return symbols_; }

 private:
  std::vector<Key> symbols_;
  std::unordered_map<Key, int> ids_;
};

struct Vocabularies {
  Vocabulary<std::string> words;
  Vocabulary<std::string> lemmas;
  Vocabulary<std::string> tags;
  Vocabulary<char32_t> chars;
  /// Arc labels between words, dense from 0 (no unknown slot).
  std::vector<std::string> labels;
  std::unordered_set<int> singleton_words;
  std::unordered_set<int> singleton_lemmas;

  int label_id(const std::string& label) const {
    for (std::size_t k = 0; k < labels.size(); ++k) {
      if (labels[k] == label) return static_cast<int>(k);
    }
    return -1;
  }
};

/// Builds symbol tables from a training corpus. Words and lemmas seen once
/// are candidates for unknown-word replacement during training.
inline Vocabularies build_vocabularies(const Corpus& corpus) {
  Vocabularies v;
  std::unordered_map<int, int> word_count, lemma_count;
  std::map<std::string, int> labels;
  for (const auto& g : corpus) {
    for (const Token& t : g.sentence().tokens()) {
      ++word_count[v.words.add(t.form)];
      ++lemma_count[v.lemmas.add(t.lemma)];
      v.tags.add(t.pos);
      for (char32_t c : t.characters()) v.chars.add(c);
    }
    for (const Arc& a : g.arcs()) {
      if (a.head != kRootPosition) labels.emplace(a.label, 0);
    }
  }
  for (const auto& [id, n] : word_count) {
    if (n == 1) v.singleton_words.insert(id);
  }
  for (const auto& [id, n] : lemma_count) {
    if (n == 1) v.singleton_lemmas.insert(id);
  }
  for (const auto& [label, unused] : labels) v.labels.push_back(label);
  if (v.labels.empty()) v.labels.push_back("dep");
  return v;
}

struct ForwardOptions {
  bool train = false;
  std::mt19937_64* rng = nullptr;
};

struct LstmState {
  Var h;
  Var c;
};

/// One recurrent state per decoder layer.
struct DecoderState {
  std::vector<LstmState> layers;
};

class PointerModel {
 public:
  struct Linear {
    std::size_t w = 0;
    std::size_t b = 0;
  };
  struct Lstm {
    std::size_t w = 0;
    std::size_t b = 0;
    int hidden = 0;
  };

  PointerModel(ModelConfig config, Vocabularies vocab)
      : config_(std::move(config)), vocab_(std::move(vocab)) {
    config_.validate();
    std::mt19937_64 rng(config_.seed);
    build(rng);
  }

  const ModelConfig& config() const { return config_; }
  const Vocabularies& vocab() const { return vocab_; }
  std::size_t label_count() const { return vocab_.labels.size(); }
  int state_dim() const { return 2 * config_.encoder_size; }

  std::span<Parameter> parameters() { return params_; }
  std::span<const Parameter> parameters() const { return params_; }
  const Parameter& param(std::size_t k) const { return params_[k]; }

  std::size_t parameter_size() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += static_cast<std::size_t>(p.value.size());
    return n;
  }

  // Parameter layout, exposed for tests that need to poke specific weights.
  std::size_t word_embedding = 0, lemma_embedding = 0, pos_embedding = 0, char_embedding = 0;
  Linear char_conv;
  std::vector<Lstm> encoder_forward, encoder_backward, decoder;
  std::size_t root_state = 0;
  Linear arc_head_mlp, arc_dep_mlp, label_head_mlp, label_dep_mlp;
  std::size_t arc_w = 0, arc_u = 0, arc_v = 0, arc_b = 0;
  std::size_t label_w = 0, label_u = 0, label_v = 0, label_b = 0;

  LstmState lstm_step(Tape& tape, const Lstm& cell, Var x, const LstmState& prev) const {
    const int hd = cell.hidden;
    const Var parts[] = {x, prev.h};
    const Var gates = tape.affine(params_[cell.w], tape.concat(parts), &params_[cell.b]);
    const Var in = tape.sigmoid(tape.slice(gates, 0, hd));
    const Var forget = tape.sigmoid(tape.slice(gates, hd, hd));
    const Var cand = tape.tanh(tape.slice(gates, 2 * hd, hd));
    const Var out = tape.sigmoid(tape.slice(gates, 3 * hd, hd));
    const Var c = tape.add(tape.hadamard(forget, prev.c), tape.hadamard(in, cand));
    const Var h = tape.hadamard(out, tape.tanh(c));
    return {h, c};
  }

  LstmState zero_state(Tape& tape, int hidden) const {
    return {tape.constant(Vector::Zero(hidden)), tape.constant(Vector::Zero(hidden))};
  }

  Var linear_elu(Tape& tape, const Linear& l, Var x) const {
    return tape.elu(tape.affine(params_[l.w], x, &params_[l.b]));
  }

  /// Inverted dropout; identity outside training.
  Var dropout(Tape& tape, Var x, double rate, const ForwardOptions& opt) const {
    if (!opt.train || rate <= 0.0) return x;
    if (!opt.rng) throw std::logic_error("training forward pass needs an rng");
    std::bernoulli_distribution keep(1.0 - rate);
    const Eigen::Index n = tape.value(x).size();
    Vector mask(n);
    const double scale = rate >= 1.0 ? 0.0 : 1.0 / (1.0 - rate);
    for (Eigen::Index k = 0; k < n; ++k) mask(k) = keep(*opt.rng) ? scale : 0.0;
    return tape.scale(x, std::move(mask));
  }

  void save(std::ostream& out) const;
  static PointerModel load(std::istream& in);

 private:
  std::size_t add_param(const std::string& name, Eigen::Index rows, Eigen::Index cols) {
    Parameter p;
    p.name = name;
    p.value = Matrix::Zero(rows, cols);
    p.index = params_.size();
    params_.push_back(std::move(p));
    return params_.size() - 1;
  }

  void uniform(std::size_t k, double bound, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-bound, bound);
    Matrix& m = params_[k].value;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = u(rng);
    }
  }

  void glorot(std::size_t k, std::mt19937_64& rng) {
    const Matrix& m = params_[k].value;
    uniform(k, std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols())), rng);
  }

  void embedding(std::size_t& slot, const std::string& name, int dim, std::size_t vocab,
                 std::mt19937_64& rng) {
    slot = add_param(name, dim, static_cast<Eigen::Index>(vocab));
    uniform(slot, std::sqrt(3.0 / dim), rng);
  }

  Linear linear(const std::string& name, int out, int in, std::mt19937_64& rng) {
    Linear l;
    l.w = add_param(name + ".w", out, in);
    l.b = add_param(name + ".b", out, 1);
    glorot(l.w, rng);
    return l;
  }

  Lstm lstm(const std::string& name, int input, int hidden, std::mt19937_64& rng) {
    Lstm cell;
    cell.hidden = hidden;
    cell.w = add_param(name + ".w", 4 * hidden, input + hidden);
    cell.b = add_param(name + ".b", 4 * hidden, 1);
    glorot(cell.w, rng);
    params_[cell.b].value.block(hidden, 0, hidden, 1).setOnes();  // forget gate
    return cell;
  }

  void build(std::mt19937_64& rng) {
    const auto& c = config_;
    embedding(word_embedding, "embed.word", c.word_dim, vocab_.words.size(), rng);
    if (c.lemma_dim > 0) embedding(lemma_embedding, "embed.lemma", c.lemma_dim, vocab_.lemmas.size(), rng);
    if (c.pos_dim > 0) embedding(pos_embedding, "embed.pos", c.pos_dim, vocab_.tags.size(), rng);
    if (c.char_dim > 0) {
      embedding(char_embedding, "embed.char", c.char_dim, vocab_.chars.size(), rng);
      char_conv = linear("char_cnn", c.cnn_filters, c.cnn_window * c.char_dim, rng);
    }
    int input = c.input_dim();
    for (int l = 0; l < c.encoder_layers; ++l) {
      const std::string tag = std::to_string(l);
      encoder_forward.push_back(lstm("encoder" + tag + ".fwd", input, c.encoder_size, rng));
      encoder_backward.push_back(lstm("encoder" + tag + ".bwd", input, c.encoder_size, rng));
      input = 2 * c.encoder_size;
    }
    root_state = add_param("root_state", state_dim(), 1);
    uniform(root_state, std::sqrt(3.0 / state_dim()), rng);
    input = state_dim();
    for (int l = 0; l < c.decoder_layers; ++l) {
      decoder.push_back(lstm("decoder" + std::to_string(l), input, c.decoder_size, rng));
      input = c.decoder_size;
    }
    arc_head_mlp = linear("arc.f1", c.arc_mlp_size, c.decoder_size, rng);
    arc_dep_mlp = linear("arc.f2", c.arc_mlp_size, state_dim(), rng);
    arc_w = add_param("arc.W", c.arc_mlp_size, c.arc_mlp_size);
    arc_u = add_param("arc.U", 1, c.arc_mlp_size);
    arc_v = add_param("arc.V", 1, c.arc_mlp_size);
    arc_b = add_param("arc.b", 1, 1);
    glorot(arc_w, rng);
    glorot(arc_u, rng);
    glorot(arc_v, rng);
    const auto labels = static_cast<int>(label_count());
    label_head_mlp = linear("label.g1", c.label_mlp_size, c.decoder_size, rng);
    label_dep_mlp = linear("label.g2", c.label_mlp_size, state_dim(), rng);
    label_w = add_param("label.W", labels * c.label_mlp_size, c.label_mlp_size);
    label_u = add_param("label.U", labels, c.label_mlp_size);
    label_v = add_param("label.V", labels, c.label_mlp_size);
    label_b = add_param("label.b", labels, 1);
    glorot(label_u, rng);
    glorot(label_v, rng);
    uniform(label_w, std::sqrt(6.0 / (2.0 * c.label_mlp_size)), rng);
  }

  ModelConfig config_;
  Vocabularies vocab_;
  std::vector<Parameter> params_;
};

/// Output of one pointer step.
struct DecoderStep {
  Var input;   ///< r = h_focus + h_lasthead
  Var hidden;  ///< s_t
  Var scores;  ///< v_t over positions 0..n
  DecoderState next;
};

/// Forward computations for one sentence on a tape: encoder states are built
/// once, then any number of decoder steps and label queries may follow.
class SentenceScorer {
 public:
  SentenceScorer(const PointerModel& model, Tape& tape, const Sentence& sentence,
                 std::span<const Vector> external = {}, ForwardOptions options = {})
      : model_(model), tape_(tape), options_(options), n_(sentence.size()) {
    const auto& c = model.config();
    if (c.external_dim > 0) {
      if (external.size() != sentence.size()) {
        throw ShapeError("expected " + std::to_string(sentence.size()) +
                         " external vectors, got " + std::to_string(external.size()));
      }
      for (const auto& v : external) {
        if (v.size() != c.external_dim) {
          throw ShapeError("external vector of dimension " + std::to_string(v.size()) +
                           ", expected " + std::to_string(c.external_dim));
        }
      }
    } else if (!external.empty()) {
      throw ShapeError("external vectors given but external_dim is 0");
    }
    encode(sentence, external);
  }

  std::size_t size() const { return n_; }

  /// h_0..h_n.
  const std::vector<Var>& states() const { return states_; }

  /// x_i before dropout (1-based).
  Var word_input(Position i) const { return inputs_.at(static_cast<std::size_t>(i - 1)); }

  DecoderState initial_state() const {
    DecoderState s;
    for (const auto& cell : model_.decoder) s.layers.push_back(model_.zero_state(tape_, cell.hidden));
    return s;
  }

  DecoderStep step(Position focus, std::optional<Position> last_head, const DecoderState& prev) {
    if (focus < 1 || static_cast<std::size_t>(focus) > n_) throw std::out_of_range("focus position");
    DecoderStep out;
    out.input = last_head ? tape_.add(state(focus), state(*last_head)) : state(focus);
    Var x = out.input;
    for (std::size_t l = 0; l < model_.decoder.size(); ++l) {
      const LstmState st = model_.lstm_step(tape_, model_.decoder[l], x, prev.layers[l]);
      out.next.layers.push_back(st);
      x = st.h;
      if (l + 1 < model_.decoder.size()) x = model_.dropout(tape_, x, model_.config().lstm_dropout, options_);
    }
    out.hidden = model_.dropout(tape_, x, model_.config().lstm_dropout, options_);

    const Var f1 = model_.linear_elu(tape_, model_.arc_head_mlp, out.hidden);
    const Var bilinear = tape_.dot_each(f1, wf2_);
    const Var head_term = tape_.affine(model_.param(model_.arc_u), f1);
    out.scores = tape_.add(bilinear, tape_.add_broadcast(key_bias_, head_term));
    return out;
  }

  /// Scores of every label for the arc head -> focus, given the step's s_t.
  Var label_scores(Var hidden, Position head) {
    auto it = label_keys_.find(head);
    if (it == label_keys_.end()) {
      it = label_keys_.emplace(head, model_.linear_elu(tape_, model_.label_dep_mlp, state(head))).first;
    }
    const Var g1 = model_.linear_elu(tape_, model_.label_head_mlp, hidden);
    return tape_.label_biaffine(model_.param(model_.label_w), model_.param(model_.label_u),
                                model_.param(model_.label_v), model_.param(model_.label_b), g1,
                                it->second);
  }

  Var state(Position j) const { return states_.at(static_cast<std::size_t>(j)); }

 private:
  int lookup_word(const Vocabulary<std::string>& vocab, const std::unordered_set<int>& singletons,
                  const std::string& key) const {
    const int id = vocab.id(key);
    if (options_.train && id != 0 && model_.config().unk_replacement > 0.0 && singletons.contains(id)) {
      std::bernoulli_distribution replace(model_.config().unk_replacement);
      if (replace(*options_.rng)) return Vocabulary<std::string>::kUnknown;
    }
    return id;
  }

  Var char_vector(const Token& t) {
    const auto& c = model_.config();
    const auto chars = t.characters();
    const int pad = (c.cnn_window - 1) / 2;
    std::vector<Var> padded;
    const Var zero = tape_.constant(Vector::Zero(c.char_dim));
    for (int k = 0; k < pad; ++k) padded.push_back(zero);
    for (char32_t ch : chars) {
      padded.push_back(tape_.column(model_.param(model_.char_embedding), model_.vocab().chars.id(ch)));
    }
    for (int k = 0; k < pad; ++k) padded.push_back(zero);
    std::vector<Var> windows;
    for (std::size_t k = 0; k + static_cast<std::size_t>(c.cnn_window) <= padded.size(); ++k) {
      const Var w = tape_.concat(std::span<const Var>(padded).subspan(k, static_cast<std::size_t>(c.cnn_window)));
      windows.push_back(tape_.affine(model_.param(model_.char_conv.w), w, &model_.param(model_.char_conv.b)));
    }
    return tape_.max_pool(windows);
  }

  void encode(const Sentence& sentence, std::span<const Vector> external) {
    const auto& c = model_.config();
    const auto& vocab = model_.vocab();
    std::vector<Var> layer_in;
    for (const Token& t : sentence.tokens()) {
      std::vector<Var> parts;
      if (c.char_dim > 0) parts.push_back(char_vector(t));
      parts.push_back(tape_.column(model_.param(model_.word_embedding),
                                   lookup_word(vocab.words, vocab.singleton_words, t.form)));
      if (c.lemma_dim > 0) {
        parts.push_back(tape_.column(model_.param(model_.lemma_embedding),
                                     lookup_word(vocab.lemmas, vocab.singleton_lemmas, t.lemma)));
      }
      if (c.pos_dim > 0) {
        parts.push_back(tape_.column(model_.param(model_.pos_embedding), vocab.tags.id(t.pos)));
      }
      if (c.external_dim > 0) {
        parts.push_back(tape_.constant(external[static_cast<std::size_t>(t.position - 1)]));
      }
      const Var x = tape_.concat(parts);
      inputs_.push_back(x);
      layer_in.push_back(model_.dropout(tape_, x, c.embedding_dropout, options_));
    }
    for (std::size_t l = 0; l < model_.encoder_forward.size(); ++l) {
      const auto& fwd = model_.encoder_forward[l];
      const auto& bwd = model_.encoder_backward[l];
      std::vector<Var> left(n_), right(n_);
      LstmState st = model_.zero_state(tape_, fwd.hidden);
      for (std::size_t i = 0; i < n_; ++i) {
        st = model_.lstm_step(tape_, fwd, layer_in[i], st);
        left[i] = st.h;
      }
      st = model_.zero_state(tape_, bwd.hidden);
      for (std::size_t i = n_; i-- > 0;) {
        st = model_.lstm_step(tape_, bwd, layer_in[i], st);
        right[i] = st.h;
      }
      for (std::size_t i = 0; i < n_; ++i) {
        const Var both[] = {left[i], right[i]};
        layer_in[i] = model_.dropout(tape_, tape_.concat(both), c.lstm_dropout, options_);
      }
    }
    states_.push_back(tape_.parameter(model_.param(model_.root_state)));
    states_.insert(states_.end(), layer_in.begin(), layer_in.end());

    std::vector<Var> dep_bias;
    for (const Var h : states_) {
      const Var f2 = model_.linear_elu(tape_, model_.arc_dep_mlp, h);
      wf2_.push_back(tape_.affine(model_.param(model_.arc_w), f2));
      dep_bias.push_back(tape_.affine(model_.param(model_.arc_v), f2));
    }
    key_bias_ = tape_.add_broadcast(tape_.concat(dep_bias), tape_.parameter(model_.param(model_.arc_b)));
  }

  const PointerModel& model_;
  Tape& tape_;
  ForwardOptions options_;
  std::size_t n_;
  std::vector<Var> inputs_;
  std::vector<Var> states_;
  std::vector<Var> wf2_;
  Var key_bias_;
  std::map<Position, Var> label_keys_;
};

struct SentenceLoss {
  Var total;
  double pointer = 0;
  double label = 0;
};

/// Teacher-forced joint loss over the oracle sequence of `gold`: pointer
/// cross-entropy at every one of the n + m steps (Shift targets the focus
/// word itself) plus label cross-entropy on every non-ROOT gold arc.
inline SentenceLoss sentence_loss(const PointerModel& model, Tape& tape, const SemanticGraph& gold,
                                  std::span<const Vector> external = {}, ForwardOptions options = {}) {
  SentenceScorer scorer(model, tape, gold.sentence(), external, options);
  Configuration config(gold.sentence_ptr());
  DecoderState state = scorer.initial_state();
  std::vector<Var> terms;
  SentenceLoss out;
  for (const Transition& t : oracle(gold)) {
    const DecoderStep st = scorer.step(config.focus(), config.last_head(), state);
    const Position target = t.is_shift() ? config.focus() : t.head;
    const Var pointer = tape.softmax_nll(st.scores, target);
    out.pointer += tape.scalar(pointer);
    terms.push_back(pointer);
    if (t.is_attach() && t.head != kRootPosition) {
      const int label = model.vocab().label_id(t.label);
      if (label >= 0) {
        const Var l = tape.softmax_nll(scorer.label_scores(st.hidden, t.head), label);
        out.label += tape.scalar(l);
        terms.push_back(l);
      }
    }
    config.apply(t);
    state = st.next;
  }
  out.total = terms.empty() ? tape.constant(Vector::Zero(1)) : tape.sum(terms);
  return out;
}

inline void PointerModel::save(std::ostream& out) const {
  nlohmann::json j;
  j["format"] = "sdp-pointer-model";
  j["version"] = 1;
  j["config"] = to_json(config_);
  auto& v = j["vocab"];
  v["words"] = std::vector<std::string>(vocab_.words.symbols().begin() + 1, vocab_.words.symbols().end());
  v["lemmas"] = std::vector<std::string>(vocab_.lemmas.symbols().begin() + 1, vocab_.lemmas.symbols().end());
  v["tags"] = std::vector<std::string>(vocab_.tags.symbols().begin() + 1, vocab_.tags.symbols().end());
  std::vector<std::uint32_t> chars;
  for (std::size_t k = 1; k < vocab_.chars.size(); ++k) chars.push_back(vocab_.chars.symbols()[k]);
  v["chars"] = chars;
  v["labels"] = vocab_.labels;
  std::vector<int> sw(vocab_.singleton_words.begin(), vocab_.singleton_words.end());
  std::vector<int> sl(vocab_.singleton_lemmas.begin(), vocab_.singleton_lemmas.end());
  std::sort(sw.begin(), sw.end());
  std::sort(sl.begin(), sl.end());
  v["singleton_words"] = sw;
  v["singleton_lemmas"] = sl;
  auto& ps = j["parameters"];
  ps = nlohmann::json::array();
  for (const auto& p : params_) {
    std::vector<double> data(p.value.data(), p.value.data() + p.value.size());
    ps.push_back({{"name", p.name}, {"rows", p.value.rows()}, {"cols", p.value.cols()}, {"data", data}});
  }
  out << j.dump() << '\n';
}

inline PointerModel PointerModel::load(std::istream& in) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("unreadable model: ") + e.what());
  }
  if (j.value("format", "") != "sdp-pointer-model") throw std::runtime_error("not a model file");
  Vocabularies vocab;
  const auto& v = j.at("vocab");
  for (const auto& w : v.at("words")) vocab.words.add(w.get<std::string>());
  for (const auto& w : v.at("lemmas")) vocab.lemmas.add(w.get<std::string>());
  for (const auto& w : v.at("tags")) vocab.tags.add(w.get<std::string>());
  for (const auto& c : v.at("chars")) vocab.chars.add(static_cast<char32_t>(c.get<std::uint32_t>()));
  vocab.labels = v.at("labels").get<std::vector<std::string>>();
  for (int id : v.at("singleton_words").get<std::vector<int>>()) vocab.singleton_words.insert(id);
  for (int id : v.at("singleton_lemmas").get<std::vector<int>>()) vocab.singleton_lemmas.insert(id);
  PointerModel model(model_config_from_json(j.at("config")), std::move(vocab));
  const auto& ps = j.at("parameters");
  if (ps.size() != model.params_.size()) throw std::runtime_error("model parameter count mismatch");
  for (std::size_t k = 0; k < ps.size(); ++k) {
    Parameter& p = model.params_[k];
    if (ps[k].at("name").get<std::string>() != p.name || ps[k].at("rows").get<Eigen::Index>() != p.value.rows() ||
        ps[k].at("cols").get<Eigen::Index>() != p.value.cols()) {
      throw std::runtime_error("model parameter " + p.name + " has a different shape");
    }
    const auto data = ps[k].at("data").get<std::vector<double>>();
    p.value = Eigen::Map<const Matrix>(data.data(), p.value.rows(), p.value.cols());
  }
  return model;
}

}  // namespace sdp
