#pragma once

/*! \file
 *  \brief Greedy and beam decoding over the multi-head transition system.
 *
 *  At each step the pointer distribution is restricted to the legal targets
 *  (the focus word itself, meaning Shift, plus every head whose Attach is
 *  legal) and renormalised. Greedy decoding takes the most probable legal
 *  target, i.e. it falls back to the next highest-scoring position whenever
 *  the best one is a duplicate arc or would close a cycle. Ties go to the
 *  lowest position. Since Shift is always legal, decoding ends after exactly
 *  n Shifts and at most n(n+1)/2 Attach steps.
 *
 *  Labels never influence the pointer: after an Attach the labeler's argmax
 *  is taken, except for ROOT arcs which carry the reserved label.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "sdp/graph.hpp"
#include "sdp/linear_fit.hpp"
#include "sdp/scorer.hpp"
#include "sdp/transitions.hpp"

namespace sdp {

struct DecodeResult {
  SemanticGraph graph;
  TransitionSequence transitions;
  /// Sum of renormalised log-probabilities of the chosen pointer targets.
  double log_prob = 0;
};

namespace detail {

struct LegalTarget {
  Position position;
  double log_prob;  // renormalised over the legal set
};

/// Legal targets in ascending position order with renormalised log-probs.
inline std::vector<LegalTarget> legal_targets(const Configuration& config, const Vector& scores) {
  std::vector<LegalTarget> out;
  double mx = -std::numeric_limits<double>::infinity();
  for (Position j = 0; j <= static_cast<Position>(config.size()); ++j) {
    if (j == config.focus() || config.can_attach(j)) {
      out.push_back({j, scores(j)});
      mx = std::max(mx, scores(j));
    }
  }
  double z = 0;
  for (const auto& t : out) z += std::exp(t.log_prob - mx);
  const double log_z = mx + std::log(z);
  for (auto& t : out) t.log_prob -= log_z;
  return out;
}

inline std::string pick_label(const PointerModel& model, SentenceScorer& scorer, Tape& tape, Var hidden,
                              Position head) {
  if (head == kRootPosition) return std::string(kRootLabel);
  const Vector& s = tape.value(scorer.label_scores(hidden, head));
  Eigen::Index best = 0;
  for (Eigen::Index l = 1; l < s.size(); ++l) {
    if (s(l) > s(best)) best = l;
  }
  return model.vocab().labels[static_cast<std::size_t>(best)];
}

inline Transition make_transition(const PointerModel& model, SentenceScorer& scorer, Tape& tape,
                                  const Configuration& config, Var hidden, Position target) {
  if (target == config.focus()) return Transition::shift();
  return Transition::attach(target, pick_label(model, scorer, tape, hidden, target));
}

}  // namespace detail

inline DecodeResult parse_greedy(const PointerModel& model, const Sentence& sentence,
                                 std::span<const Vector> external = {}) {
  Tape tape;
  SentenceScorer scorer(model, tape, sentence, external);
  Configuration config(sentence);
  DecoderState state = scorer.initial_state();
  DecodeResult result;
  while (!config.is_terminal()) {
    const DecoderStep st = scorer.step(config.focus(), config.last_head(), state);
    const auto targets = detail::legal_targets(config, tape.value(st.scores));
    const auto best = std::max_element(targets.begin(), targets.end(), [](const auto& a, const auto& b) {
      return a.log_prob < b.log_prob;  // first maximum wins, i.e. lowest position
    });
    const Transition t = detail::make_transition(model, scorer, tape, config, st.hidden, best->position);
    result.log_prob += best->log_prob;
    result.transitions.push_back(t);
    config.apply(t);
    state = st.next;
  }
  result.graph = config.built();
  return result;
}

struct BeamItem {
  Configuration config;
  double log_prob = 0;
  DecoderState state;
  TransitionSequence history;
};

/// Beam search over pointer targets. Terminal items stay in the beam as
/// frozen candidates; search stops once every kept item is terminal.
inline DecodeResult parse_beam(const PointerModel& model, const Sentence& sentence, std::size_t beam_width,
                               std::span<const Vector> external = {}) {
  if (beam_width < 1) throw ContractViolation("beam width must be >= 1");
  Tape tape;
  SentenceScorer scorer(model, tape, sentence, external);
  std::vector<BeamItem> beam;
  beam.push_back(BeamItem{Configuration(sentence), 0.0, scorer.initial_state(), {}});

  struct Candidate {
    std::size_t parent;
    std::optional<Position> target;  // empty: frozen terminal item
    double log_prob;                 // accumulated
    double step_log_prob;
    Var hidden;
    DecoderState next;
  };

  auto all_terminal = [](const std::vector<BeamItem>& items) {
    return std::all_of(items.begin(), items.end(), [](const BeamItem& b) { return b.config.is_terminal(); });
  };
  while (!all_terminal(beam)) {
    std::vector<Candidate> candidates;
    for (std::size_t k = 0; k < beam.size(); ++k) {
      const BeamItem& item = beam[k];
      if (item.config.is_terminal()) {
        candidates.push_back({k, std::nullopt, item.log_prob, 0.0, Var{}, {}});
        continue;
      }
      const DecoderStep st = scorer.step(item.config.focus(), item.config.last_head(), item.state);
      for (const auto& t : detail::legal_targets(item.config, tape.value(st.scores))) {
        candidates.push_back({k, t.position, item.log_prob + t.log_prob, t.log_prob, st.hidden, st.next});
      }
    }
    // Equal totals fall back to beam rank, then the step's own log-prob (which
    // rounding in the sum may have hidden), then the lower position.
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
      if (a.parent != b.parent) return a.parent < b.parent;
      if (a.step_log_prob != b.step_log_prob) return a.step_log_prob > b.step_log_prob;
      return a.target.value_or(-1) < b.target.value_or(-1);
    });
    if (candidates.size() > beam_width) candidates.resize(beam_width);

    std::vector<BeamItem> next;
    next.reserve(candidates.size());
    for (auto& c : candidates) {
      BeamItem item = beam[c.parent];
      if (c.target) {
        const Transition t = detail::make_transition(model, scorer, tape, item.config, c.hidden, *c.target);
        item.config.apply(t);
        item.history.push_back(t);
        item.state = std::move(c.next);
        item.log_prob = c.log_prob;
      }
      next.push_back(std::move(item));
    }
    beam = std::move(next);
  }
  const BeamItem& best = beam.front();
  return DecodeResult{best.config.built(), best.history, best.log_prob};
}

inline DecodeResult parse_sentence(const PointerModel& model, const Sentence& sentence, std::size_t beam_width,
                                   std::span<const Vector> external = {}) {
  return beam_width <= 1 ? parse_greedy(model, sentence, external)
                         : parse_beam(model, sentence, beam_width, external);
}

/// Decodes a corpus, optionally over several threads sharing the model.
/// `external` is either empty or aligned with `sentences`.
inline std::vector<DecodeResult> parse_corpus(const PointerModel& model, std::span<const Sentence> sentences,
                                              std::size_t beam_width,
                                              std::span<const std::vector<Vector>> external = {},
                                              std::size_t jobs = 1) {
  std::vector<std::optional<DecodeResult>> slots(sentences.size());
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t k = first; k < sentences.size(); k += stride) {
      const std::span<const Vector> ext = external.empty() ? std::span<const Vector>{} : external[k];
      slots[k] = parse_sentence(model, sentences[k], beam_width, ext);
    }
  };
  jobs = std::max<std::size_t>(1, std::min(jobs, sentences.size()));
  if (jobs == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(work, j, jobs);
  }
  std::vector<DecodeResult> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

struct SentenceStat {
  std::size_t id = 0;  // 1-based position in the corpus
  std::size_t length = 0;
  std::size_t transitions = 0;
};

struct TransitionStats {
  std::vector<SentenceStat> rows;
  std::optional<LinearFit> fit;  // absent when fewer than two distinct lengths
  double arcs_per_word = 0;
  double singleton_share = 0;
};

/// Statistics over graphs whose transition counts are n + m (oracle counts
/// for gold graphs, or decoded graphs from a model).
inline TransitionStats transition_stats(std::span<const SemanticGraph> graphs) {
  TransitionStats stats;
  std::vector<double> xs, ys;
  std::size_t words = 0, arcs = 0, singletons = 0;
  for (std::size_t k = 0; k < graphs.size(); ++k) {
    const auto& g = graphs[k];
    stats.rows.push_back({k + 1, g.size(), g.size() + g.arc_count()});
    xs.push_back(static_cast<double>(g.size()));
    ys.push_back(static_cast<double>(g.size() + g.arc_count()));
    words += g.size();
    arcs += g.arc_count();
    singletons += singleton_count(g);
  }
  if (words > 0) {
    stats.arcs_per_word = static_cast<double>(arcs) / static_cast<double>(words);
    stats.singleton_share = static_cast<double>(singletons) / static_cast<double>(words);
  }
  if (std::adjacent_find(xs.begin(), xs.end(), std::not_equal_to<>()) != xs.end()) {
    stats.fit = fit_line(xs, ys);
  }
  return stats;
}

/// Oracle mode: counts the oracle transition sequence of each gold graph.
inline TransitionStats oracle_transition_stats(std::span<const SemanticGraph> corpus) {
  TransitionStats stats = transition_stats(corpus);
  for (std::size_t k = 0; k < corpus.size(); ++k) stats.rows[k].transitions = oracle(corpus[k]).size();
  return stats;
}

/// Model mode: counts the transitions the decoder actually predicts.
inline TransitionStats model_transition_stats(const PointerModel& model, std::span<const SemanticGraph> corpus,
                                              std::size_t beam_width,
                                              std::span<const std::vector<Vector>> external = {},
                                              std::size_t jobs = 1) {
  std::vector<Sentence> sentences;
  for (const auto& g : corpus) sentences.push_back(g.sentence());
  const auto decoded = parse_corpus(model, sentences, beam_width, external, jobs);
  Corpus graphs;
  for (const auto& d : decoded) graphs.push_back(d.graph);
  TransitionStats stats = transition_stats(graphs);
  for (std::size_t k = 0; k < decoded.size(); ++k) stats.rows[k].transitions = decoded[k].transitions.size();
  return stats;
}

}  // namespace sdp
