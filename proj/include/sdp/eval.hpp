#pragma once

/*! \file
 *  \brief Labelled and unlabelled arc precision/recall/F1, ROOT arcs included.
 *
 *  An arc is an unlabelled match when (head, dependent) agree and a labelled
 *  match when the label agrees as well. Ratios with a zero denominator are 0.
 */

#include <cstdio>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdp/graph.hpp"

namespace sdp {

class MisalignedCorpora : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EvalCounts {
  std::size_t predicted = 0;
  std::size_t gold = 0;
  std::size_t unlabelled_tp = 0;
  std::size_t labelled_tp = 0;

  EvalCounts& operator+=(const EvalCounts& o) {
    predicted += o.predicted;
    gold += o.gold;
    unlabelled_tp += o.unlabelled_tp;
    labelled_tp += o.labelled_tp;
    return *this;
  }
};

struct EvalScores {
  EvalCounts counts;
  double up = 0, ur = 0, uf1 = 0;
  double lp = 0, lr = 0, lf1 = 0;
};

namespace detail {

inline double safe_ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

inline double harmonic(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

}  // namespace detail

inline EvalCounts count_matches(const SemanticGraph& pred, const SemanticGraph& gold) {
  EvalCounts c;
  c.predicted = pred.arc_count();
  c.gold = gold.arc_count();
  for (const Arc& a : pred.arcs()) {
    if (const std::string* label = gold.label(a.head, a.dependent)) {
      ++c.unlabelled_tp;
      if (*label == a.label) ++c.labelled_tp;
    }
  }
  return c;
}

inline EvalScores scores_from_counts(const EvalCounts& c) {
  EvalScores s;
  s.counts = c;
  s.up = detail::safe_ratio(c.unlabelled_tp, c.predicted);
  s.ur = detail::safe_ratio(c.unlabelled_tp, c.gold);
  s.uf1 = detail::harmonic(s.up, s.ur);
  s.lp = detail::safe_ratio(c.labelled_tp, c.predicted);
  s.lr = detail::safe_ratio(c.labelled_tp, c.gold);
  s.lf1 = detail::harmonic(s.lp, s.lr);
  return s;
}

/// Corpus-level micro scores. Sentences must align by length and forms.
inline EvalScores evaluate(std::span<const SemanticGraph> pred, std::span<const SemanticGraph> gold) {
  if (pred.size() != gold.size()) {
    throw MisalignedCorpora("predicted corpus has " + std::to_string(pred.size()) +
                            " sentences, gold has " + std::to_string(gold.size()));
  }
  EvalCounts total;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const auto& pt = pred[k].sentence().tokens();
    const auto& gt = gold[k].sentence().tokens();
    bool same = pt.size() == gt.size();
    for (std::size_t j = 0; same && j < pt.size(); ++j) same = pt[j].form == gt[j].form;
    if (!same) throw MisalignedCorpora("sentence " + std::to_string(k + 1) + " differs");
    total += count_matches(pred[k], gold[k]);
  }
  return scores_from_counts(total);
}

inline double macro_average(std::span<const double> scores) {
  if (scores.empty()) throw std::invalid_argument("macro_average of an empty list");
  return std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
}

/// Percentage with one decimal, as printed by the eval table.
inline std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * fraction);
  return buf;
}

/// Header and value rows: UP UR UF1 LP LR LF1.
inline std::string format_eval_table(const EvalScores& s) {
  std::string out = "UP\tUR\tUF1\tLP\tLR\tLF1\n";
  out += format_percent(s.up) + '\t' + format_percent(s.ur) + '\t' + format_percent(s.uf1) + '\t' +
         format_percent(s.lp) + '\t' + format_percent(s.lr) + '\t' + format_percent(s.lf1) + '\n';
  return out;
}

}  // namespace sdp
