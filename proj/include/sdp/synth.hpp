#pragma once

/*! \file
 *  \brief Random labelled DAG corpora with controlled statistics.
 *
 *  Each sentence draws a length uniformly from [min_length, max_length]. The
 *  arc count is the stochastically rounded `arc_ratio * n`, so the corpus-wide
 *  arcs-per-word ratio converges to `arc_ratio`. When a singleton share is
 *  requested, that fraction of words (again stochastically rounded) receives
 *  no arcs and every other word gets at least one. Acyclicity comes from a
 *  random hidden ranking of the words: arcs always point from lower to higher
 *  rank, and ROOT ranks below everything.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdp/graph.hpp"

namespace sdp {

struct SynthOptions {
  std::size_t sentences = 100;
  std::size_t min_length = 5;
  std::size_t max_length = 30;
  double arc_ratio = 0.8;
  std::optional<double> singleton_share;
  std::uint64_t seed = 1;
  std::size_t vocabulary = 200;
};

struct SynthPreset {
  const char* name;
  double arc_ratio;
  double singleton_share;
};

/// Arcs per word and singleton shares of typical DM, PAS and PSD training data.
inline constexpr SynthPreset kSynthPresets[] = {
    {"dm", 0.79, 0.23},
    {"pas", 0.99, 0.06},
    {"psd", 0.70, 0.35},
};

class InfeasibleSynthOptions : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline const std::vector<std::string>& synth_labels() {
  static const std::vector<std::string> labels{"ARG1", "ARG2", "ARG3", "BV",
                                               "compound", "poss", "conj", "loc"};
  return labels;
}

inline const std::vector<std::string>& synth_tags() {
  static const std::vector<std::string> tags{"NN", "NNS", "VB", "VBD", "DT",
                                             "JJ", "IN", "RB", "PRP", "CC"};
  return tags;
}

inline std::size_t stochastic_round(double x, std::mt19937_64& rng) {
  const double base = std::floor(x);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return static_cast<std::size_t>(base) + (u(rng) < x - base ? 1 : 0);
}

}  // namespace detail

inline void check_feasible(const SynthOptions& o) {
  if (o.min_length < 1 || o.min_length > o.max_length) {
    throw InfeasibleSynthOptions("length range must satisfy 1 <= min <= max");
  }
  if (!(o.arc_ratio >= 0.0) || !std::isfinite(o.arc_ratio)) {
    throw InfeasibleSynthOptions("arc ratio must be a finite value >= 0");
  }
  if (o.vocabulary < 1) throw InfeasibleSynthOptions("vocabulary must be >= 1");
  const double s = o.singleton_share.value_or(0.0);
  if (o.singleton_share && !(s >= 0.0 && s <= 1.0)) {
    throw InfeasibleSynthOptions("singleton share must lie in [0, 1]");
  }
  // Every non-singleton needs an arc, and one arc covers at most two words.
  if (o.singleton_share && o.arc_ratio < (1.0 - s) / 2.0 - 1e-12) {
    throw InfeasibleSynthOptions("arc ratio too low to attach every non-singleton word");
  }
  if (o.singleton_share && s >= 1.0 && o.arc_ratio > 0.0) {
    throw InfeasibleSynthOptions("all words are singletons but arcs were requested");
  }
  // A DAG over q words plus ROOT holds at most q(q+1)/2 arcs.
  const double q = (1.0 - s) * static_cast<double>(o.min_length);
  if (o.arc_ratio * static_cast<double>(o.min_length) > q * (q + 1.0) / 2.0 + 1.0) {
    throw InfeasibleSynthOptions("arc ratio too high for the shortest sentences");
  }
}

/// `requested`, when given, receives the arc count asked for before clamping
/// to what the sentence can hold.
inline SemanticGraph synth_sentence(std::size_t n, const SynthOptions& o, std::mt19937_64& rng,
                                    std::size_t* requested = nullptr) {
  const auto& labels = detail::synth_labels();
  const auto& tags = detail::synth_tags();
  std::uniform_int_distribution<std::size_t> word_dist(0, o.vocabulary - 1);
  std::uniform_int_distribution<std::size_t> tag_dist(0, tags.size() - 1);
  std::uniform_int_distribution<std::size_t> label_dist(0, labels.size() - 1);

  std::vector<Token> tokens;
  tokens.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Token t;
    t.position = static_cast<Position>(k + 1);
    const std::size_t w = word_dist(rng);
    t.form = "w" + std::to_string(w);
    t.lemma = "l" + std::to_string(w);
    t.pos = tags[tag_dist(rng)];
    tokens.push_back(std::move(t));
  }
  SemanticGraph g(Sentence(std::move(tokens)));

  std::vector<Position> words(n);
  std::iota(words.begin(), words.end(), Position{1});
  std::shuffle(words.begin(), words.end(), rng);
  std::vector<std::size_t> rank(n + 1, 0);
  for (std::size_t k = 0; k < n; ++k) rank[static_cast<std::size_t>(words[k])] = k + 1;

  std::vector<Position> active;
  if (o.singleton_share) {
    const std::size_t singles =
        std::min(n, detail::stochastic_round(*o.singleton_share * static_cast<double>(n), rng));
    std::shuffle(words.begin(), words.end(), rng);
    active.assign(words.begin() + static_cast<std::ptrdiff_t>(singles), words.end());
  } else {
    active = words;
  }
  const std::size_t q = active.size();
  const std::size_t max_arcs = q * (q + 1) / 2;
  const std::size_t min_arcs = o.singleton_share ? (q + 1) / 2 : 0;
  const std::size_t wanted = detail::stochastic_round(o.arc_ratio * static_cast<double>(n), rng);
  if (requested) *requested = wanted;
  const std::size_t target = std::clamp(wanted, std::min(min_arcs, max_arcs), max_arcs);

  auto add = [&](Position a, Position b) {
    if (rank[static_cast<std::size_t>(a)] > rank[static_cast<std::size_t>(b)]) std::swap(a, b);
    const std::string& label = a == kRootPosition ? std::string(kRootLabel) : labels[label_dist(rng)];
    g.add_arc(Arc{a, b, label});
  };

  if (o.singleton_share) {
    std::shuffle(active.begin(), active.end(), rng);
    for (std::size_t k = 0; k + 1 < q; k += 2) add(active[k], active[k + 1]);
    if (q % 2 == 1) add(kRootPosition, active.back());
  }

  std::vector<std::pair<Position, Position>> candidates;
  for (Position d : active) {
    candidates.emplace_back(kRootPosition, d);
    for (Position h : active) {
      if (rank[static_cast<std::size_t>(h)] < rank[static_cast<std::size_t>(d)] && !g.has_arc(h, d)) {
        candidates.emplace_back(h, d);
      }
    }
  }
  std::sort(candidates.begin(), candidates.end());
  std::shuffle(candidates.begin(), candidates.end(), rng);
  for (const auto& [h, d] : candidates) {
    if (g.arc_count() >= target) break;
    if (!g.has_arc(h, d)) add(h, d);
  }
  return g;
}

inline Corpus synth_corpus(const SynthOptions& o) {
  check_feasible(o);
  std::mt19937_64 rng(o.seed);
  std::uniform_int_distribution<std::size_t> length(o.min_length, o.max_length);
  Corpus corpus;
  corpus.reserve(o.sentences);
  std::size_t words = 0, arcs = 0, requested = 0;
  for (std::size_t k = 0; k < o.sentences; ++k) {
    std::size_t r = 0;
    corpus.push_back(synth_sentence(length(rng), o, rng, &r));
    words += corpus.back().size();
    arcs += corpus.back().arc_count();
    requested += r;
  }
  // Clamping to the per-sentence minimum or maximum shifts the realised ratio.
  const double drift = std::abs(static_cast<double>(arcs) - static_cast<double>(requested)) /
                       static_cast<double>(std::max<std::size_t>(words, 1));
  if (drift > std::max(0.01, 0.02 * o.arc_ratio)) {
    throw InfeasibleSynthOptions("arc ratio " + std::to_string(o.arc_ratio) +
                                 " cannot be met with these lengths and singleton share (realised " +
                                 std::to_string(static_cast<double>(arcs) / static_cast<double>(words)) + ")");
  }
  return corpus;
}

}  // namespace sdp
