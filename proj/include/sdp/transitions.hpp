#pragma once

/*! \file
 *  \brief Multi-head transition system.
 *
 *  A configuration is a focus word i (1..n, n+1 when terminal) plus the graph
 *  built so far. Two transitions exist:
 *  - Attach-p (p != i): adds the arc p -> i, allowed only if the arc is new
 *    and closes no cycle;
 *  - Shift: moves the focus to i+1. A pointer that selects i itself means Shift.
 *
 *  The static oracle visits words left to right, attaching each word's gold
 *  heads in ascending position order (ROOT first) and then shifting, so a
 *  graph with n words and m arcs takes exactly n + m transitions.
 */

#include <cstddef>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sdp/cycle_guard.hpp"
#include "sdp/graph.hpp"

namespace sdp {

struct Transition {
  enum class Kind { shift, attach };

  Kind kind = Kind::shift;
  Position head = 0;
  std::string label;

  static Transition shift() { return Transition{}; }
  static Transition attach(Position head, std::string label) {
    return Transition{Kind::attach, head, std::move(label)};
  }

  bool is_shift() const { return kind == Kind::shift; }
  bool is_attach() const { return kind == Kind::attach; }

  friend bool operator==(const Transition&, const Transition&) = default;
};

using TransitionSequence = std::vector<Transition>;

/// Replay hit a transition that is illegal in the reached configuration.
class IllegalTransition : public ContractViolation {
 public:
  IllegalTransition(std::size_t index, const std::string& what)
      : ContractViolation("step " + std::to_string(index) + ": " + what), index_(index) {}

  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

class Configuration {
 public:
  explicit Configuration(std::shared_ptr<const Sentence> sentence)
      : built_(sentence), guard_(sentence->size() + 1) {}

  explicit Configuration(const Sentence& sentence)
      : Configuration(std::make_shared<const Sentence>(sentence)) {}

  const Sentence& sentence() const { return built_.sentence(); }
  std::size_t size() const { return built_.size(); }
  Position focus() const { return focus_; }
  bool is_terminal() const { return static_cast<std::size_t>(focus_) > size(); }
  const SemanticGraph& built() const { return built_; }
  const CycleGuard& guard() const { return guard_; }

  /// Most recent head attached to the current focus word.
  std::optional<Position> last_head() const { return last_head_; }

  /// Number of heads already attached to the focus word.
  std::size_t focus_head_count() const { return focus_heads_; }

  /// Attach-p legality for the current focus word.
  bool can_attach(Position p) const {
    if (is_terminal()) return false;
    if (p < 0 || static_cast<std::size_t>(p) > size() || p == focus_) return false;
    if (built_.has_arc(p, focus_)) return false;
    return !guard_.would_create_cycle(static_cast<std::size_t>(p),
                                      static_cast<std::size_t>(focus_));
  }

  bool is_legal(const Transition& t) const {
    if (is_terminal()) return false;
    return t.is_shift() || can_attach(t.head);
  }

  void apply(const Transition& t) {
    if (is_terminal()) throw ContractViolation("transition applied to a terminal configuration");
    if (t.is_shift()) {
      ++focus_;
      last_head_.reset();
      focus_heads_ = 0;
      return;
    }
    if (!can_attach(t.head)) {
      throw ContractViolation("illegal Attach-" + std::to_string(t.head) + " at focus " +
                              std::to_string(focus_));
    }
    built_.add_arc(Arc{t.head, focus_, t.label});
    guard_.insert_arc(static_cast<std::size_t>(t.head), static_cast<std::size_t>(focus_));
    last_head_ = t.head;
    ++focus_heads_;
  }

 private:
  SemanticGraph built_;
  CycleGuard guard_;
  Position focus_ = 1;
  std::optional<Position> last_head_;
  std::size_t focus_heads_ = 0;
};

inline Configuration initial_config(const Sentence& s) { return Configuration(s); }

inline bool is_legal(const Configuration& c, const Transition& t) { return c.is_legal(t); }

inline Configuration apply(Configuration c, const Transition& t) {
  c.apply(t);
  return c;
}

/// Static oracle: left to right, heads ascending, then Shift.
inline TransitionSequence oracle(const SemanticGraph& g) {
  if (!is_acyclic(g)) throw ContractViolation("oracle on a cyclic graph");
  TransitionSequence seq;
  seq.reserve(g.size() + g.arc_count());
  for (Position i = 1; static_cast<std::size_t>(i) <= g.size(); ++i) {
    for (Position p : g.heads_of(i)) seq.push_back(Transition::attach(p, *g.label(p, i)));
    seq.push_back(Transition::shift());
  }
  return seq;
}

inline SemanticGraph replay(std::shared_ptr<const Sentence> s, const TransitionSequence& seq) {
  Configuration c(std::move(s));
  for (std::size_t k = 0; k < seq.size(); ++k) {
    if (c.is_terminal()) throw IllegalTransition(k, "configuration already terminal");
    if (!c.is_legal(seq[k])) throw IllegalTransition(k, "illegal transition");
    c.apply(seq[k]);
  }
  if (!c.is_terminal()) throw IllegalTransition(seq.size(), "sequence ended before the last Shift");
  return c.built();
}

inline SemanticGraph replay(const Sentence& s, const TransitionSequence& seq) {
  return replay(std::make_shared<const Sentence>(s), seq);
}

inline std::string to_string(const Transition& t) {
  return t.is_shift() ? std::string("SHIFT") : "ATTACH " + std::to_string(t.head) + " " + t.label;
}

/// One transition per line, blank line after the sequence.
inline void write_transitions(const TransitionSequence& seq, std::ostream& out) {
  for (const auto& t : seq) out << to_string(t) << '\n';
  out << '\n';
}

/// Reads sequences written by write_transitions.
inline std::vector<TransitionSequence> read_transitions(std::istream& in) {
  std::vector<TransitionSequence> out;
  TransitionSequence current;
  bool open = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      if (open) out.push_back(std::move(current));
      current.clear();
      open = false;
      continue;
    }
    open = true;
    std::istringstream fields(line);
    std::string word;
    fields >> word;
    if (word == "SHIFT") {
      current.push_back(Transition::shift());
    } else if (word == "ATTACH") {
      Position p = -1;
      std::string label;
      if (!(fields >> p >> label)) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": bad ATTACH");
      }
      current.push_back(Transition::attach(p, label));
    } else {
      throw std::runtime_error("line " + std::to_string(line_no) + ": unknown transition '" +
                               word + "'");
    }
  }
  if (open) out.push_back(std::move(current));
  return out;
}

}  // namespace sdp
