#pragma once

/*! \file
 *  \brief Sentences and semantic dependency graphs.
 *
 *  Positions are 1-based for words; position 0 is the artificial ROOT node,
 *  which is never stored as a Token. A SemanticGraph is a set of labelled
 *  arcs head -> dependent over positions 0..n with at most one arc per
 *  (head, dependent) pair. Words may have any number of heads.
 */

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sdp {

using Position = int;

inline constexpr Position kRootPosition = 0;
inline constexpr std::string_view kRootLabel = "ROOT";

/// Raised when a caller breaks a documented precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Decodes UTF-8 into unicode scalar values. Malformed sequences become U+FFFD.
inline std::vector<char32_t> decode_utf8(std::string_view text) {
  std::vector<char32_t> out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    int extra = 0;
    char32_t cp = 0;
    if (lead < 0x80) {
      cp = lead;
    } else if ((lead & 0xE0) == 0xC0) {
      cp = lead & 0x1F;
      extra = 1;
    } else if ((lead & 0xF0) == 0xE0) {
      cp = lead & 0x0F;
      extra = 2;
    } else if ((lead & 0xF8) == 0xF0) {
      cp = lead & 0x07;
      extra = 3;
    } else {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    bool ok = true;
    for (int k = 1; k <= extra; ++k) {
      if (i + k >= text.size()) {
        ok = false;
        break;
      }
      const auto cont = static_cast<unsigned char>(text[i + k]);
      if ((cont & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (cont & 0x3F);
    }
    if (!ok) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += static_cast<std::size_t>(extra) + 1;
  }
  return out;
}

namespace detail {

inline bool has_field_breaking_char(std::string_view s) {
  return s.find_first_of("\t\n\r") != std::string_view::npos;
}

inline bool has_whitespace(std::string_view s) {
  return s.find_first_of(" \t\n\r\f\v") != std::string_view::npos;
}

}  // namespace detail

struct Token {
  Position position = 1;
  std::string form;
  std::string lemma = "_";
  std::string pos = "_";
  /// Column 7 of the SDP format; carried through untouched.
  std::string frame = "_";
  /// Predicate flag as read from a corpus. Writers also flag any word with
  /// outgoing arcs, so this only matters for predicates without arguments.
  bool predicate = false;

  std::vector<char32_t> characters() const { return decode_utf8(form); }

  friend bool operator==(const Token&, const Token&) = default;
};

class Sentence {
 public:
  Sentence() = default;

  explicit Sentence(std::vector<Token> tokens, std::vector<std::string> comments = {})
      : tokens_(std::move(tokens)), comments_(std::move(comments)) {
    for (std::size_t k = 0; k < tokens_.size(); ++k) {
      const Token& t = tokens_[k];
      if (t.position != static_cast<Position>(k + 1)) {
        throw ContractViolation("token " + std::to_string(k) + " has position " +
                                std::to_string(t.position) + ", expected " +
                                std::to_string(k + 1));
      }
      if (t.form.empty()) throw ContractViolation("empty form at position " + std::to_string(k + 1));
      if (t.lemma.empty() || t.pos.empty() || t.frame.empty()) {
        throw ContractViolation("empty lemma/pos/frame at position " + std::to_string(k + 1));
      }
      if (detail::has_field_breaking_char(t.form) || detail::has_field_breaking_char(t.lemma) ||
          detail::has_field_breaking_char(t.pos) || detail::has_field_breaking_char(t.frame)) {
        throw ContractViolation("tab or newline inside token field at position " +
                                std::to_string(k + 1));
      }
    }
  }

  /// Builds a sentence from bare forms; lemma and POS default to "_".
  static Sentence from_forms(const std::vector<std::string>& forms) {
    std::vector<Token> tokens;
    tokens.reserve(forms.size());
    for (std::size_t k = 0; k < forms.size(); ++k) {
      Token t;
      t.position = static_cast<Position>(k + 1);
      t.form = forms[k];
      tokens.push_back(std::move(t));
    }
    return Sentence(std::move(tokens));
  }

  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }

  /// 1-based access.
  const Token& token(Position p) const {
    if (p < 1 || static_cast<std::size_t>(p) > tokens_.size()) {
      throw std::out_of_range("token position " + std::to_string(p));
    }
    return tokens_[static_cast<std::size_t>(p - 1)];
  }

  const std::vector<Token>& tokens() const { return tokens_; }
  const std::vector<std::string>& comments() const { return comments_; }

  friend bool operator==(const Sentence&, const Sentence&) = default;

 private:
  std::vector<Token> tokens_;
  std::vector<std::string> comments_;
};

struct Arc {
  Position head = 0;
  Position dependent = 1;
  std::string label;

  friend bool operator==(const Arc&, const Arc&) = default;
};

class SemanticGraph {
 public:
  SemanticGraph() : sentence_(std::make_shared<const Sentence>()) {}

  explicit SemanticGraph(std::shared_ptr<const Sentence> sentence) : sentence_(std::move(sentence)) {
    if (!sentence_) throw ContractViolation("null sentence");
  }

  explicit SemanticGraph(Sentence sentence)
      : sentence_(std::make_shared<const Sentence>(std::move(sentence))) {}

  /// Fully validated construction: endpoints, duplicates, labels and acyclicity.
  SemanticGraph(Sentence sentence, const std::vector<Arc>& arcs);

  const Sentence& sentence() const { return *sentence_; }
  const std::shared_ptr<const Sentence>& sentence_ptr() const { return sentence_; }
  std::size_t size() const { return sentence_->size(); }

  /// Adds one arc. Checks endpoints, duplicates and the ROOT label rule but not
  /// acyclicity; callers that build incrementally own that check.
  void add_arc(Arc arc) {
    const auto n = static_cast<Position>(size());
    if (arc.dependent < 1 || arc.dependent > n || arc.head < 0 || arc.head > n) {
      throw ContractViolation("arc " + std::to_string(arc.head) + "->" +
                              std::to_string(arc.dependent) + " out of range for n=" +
                              std::to_string(n));
    }
    if (arc.head == arc.dependent) {
      throw ContractViolation("self loop at " + std::to_string(arc.head));
    }
    if (arc.label.empty() || arc.label == "_" || detail::has_whitespace(arc.label)) {
      throw ContractViolation("invalid arc label '" + arc.label + "'");
    }
    if ((arc.head == kRootPosition) != (arc.label == kRootLabel)) {
      throw ContractViolation("label ROOT is reserved for arcs from position 0");
    }
    const Key key{arc.dependent, arc.head};
    if (arcs_.contains(key)) {
      throw ContractViolation("duplicate arc " + std::to_string(arc.head) + "->" +
                              std::to_string(arc.dependent));
    }
    arcs_.emplace(key, std::move(arc.label));
  }

  bool has_arc(Position head, Position dependent) const {
    return arcs_.contains(Key{dependent, head});
  }

  /// Label of the arc, or nullptr if absent.
  const std::string* label(Position head, Position dependent) const {
    const auto it = arcs_.find(Key{dependent, head});
    return it == arcs_.end() ? nullptr : &it->second;
  }

  std::size_t arc_count() const { return arcs_.size(); }

  /// Arcs ordered by dependent, then head.
  std::vector<Arc> arcs() const {
    std::vector<Arc> out;
    out.reserve(arcs_.size());
    for (const auto& [key, label] : arcs_) out.push_back(Arc{key.head, key.dependent, label});
    return out;
  }

  /// Heads of a word in ascending position order (ROOT first).
  std::vector<Position> heads_of(Position dependent) const {
    std::vector<Position> out;
    for (auto it = arcs_.lower_bound(Key{dependent, -1});
         it != arcs_.end() && it->first.dependent == dependent; ++it) {
      out.push_back(it->first.head);
    }
    return out;
  }

  bool has_outgoing(Position head) const {
    return std::any_of(arcs_.begin(), arcs_.end(),
                       [head](const auto& kv) { return kv.first.head == head; });
  }

  friend bool operator==(const SemanticGraph& a, const SemanticGraph& b) {
    return *a.sentence_ == *b.sentence_ && a.arcs_ == b.arcs_;
  }

 private:
  struct Key {
    Position dependent;
    Position head;
    auto operator<=>(const Key&) const = default;
  };

  std::shared_ptr<const Sentence> sentence_;
  std::map<Key, std::string> arcs_;
};

using Corpus = std::vector<SemanticGraph>;

inline std::size_t graph_arc_count(const SemanticGraph& g) { return g.arc_count(); }

/// Three-colour DFS over positions 0..n.
inline bool is_acyclic(const SemanticGraph& g) {
  const std::size_t nodes = g.size() + 1;
  std::vector<std::vector<Position>> out(nodes);
  for (const Arc& a : g.arcs()) out[static_cast<std::size_t>(a.head)].push_back(a.dependent);

  enum class Colour { white, grey, black };
  std::vector<Colour> colour(nodes, Colour::white);
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  for (std::size_t start = 0; start < nodes; ++start) {
    if (colour[start] != Colour::white) continue;
    stack.emplace_back(start, 0);
    colour[start] = Colour::grey;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next < out[v].size()) {
        const auto w = static_cast<std::size_t>(out[v][next++]);
        if (colour[w] == Colour::grey) return false;
        if (colour[w] == Colour::white) {
          colour[w] = Colour::grey;
          stack.emplace_back(w, 0);
        }
      } else {
        colour[v] = Colour::black;
        stack.pop_back();
      }
    }
  }
  return true;
}

inline SemanticGraph::SemanticGraph(Sentence sentence, const std::vector<Arc>& arcs)
    : SemanticGraph(std::move(sentence)) {
  for (const Arc& a : arcs) add_arc(a);
  if (!is_acyclic(*this)) throw ContractViolation("graph contains a cycle");
}

/// Number of words with no incident arcs.
inline std::size_t singleton_count(const SemanticGraph& g) {
  std::vector<bool> touched(g.size() + 1, false);
  for (const Arc& a : g.arcs()) {
    touched[static_cast<std::size_t>(a.head)] = true;
    touched[static_cast<std::size_t>(a.dependent)] = true;
  }
  return static_cast<std::size_t>(std::count(touched.begin() + 1, touched.end(), false));
}

}  // namespace sdp
