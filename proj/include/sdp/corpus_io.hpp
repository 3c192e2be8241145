#pragma once

/*! \file
 *  \brief Corpus readers and writers.
 *
 *  Two formats are supported:
 *  - the tab-separated SDP format (id, form, lemma, pos, top,
 *    pred, frame, then one argument column per predicate);
 *  - a line-delimited JSON format for synthetic corpora, one sentence per
 *    line: {"tokens": [[form, lemma, pos], ...], "arcs": [[head, dep, label], ...]}.
 */

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdp/graph.hpp"

namespace sdp {

enum class ParseErrorKind {
  malformed_columns,
  malformed_field,
  non_dense_ids,
  predicate_mismatch,
  cyclic_graph,
};

inline const char* to_string(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::malformed_columns: return "malformed column count";
    case ParseErrorKind::malformed_field: return "malformed field";
    case ParseErrorKind::non_dense_ids: return "non-dense token ids";
    case ParseErrorKind::predicate_mismatch: return "predicate column/flag mismatch";
    case ParseErrorKind::cyclic_graph: return "cyclic graph";
  }
  return "parse error";
}

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, std::size_t line, const std::string& detail)
      : std::runtime_error("line " + std::to_string(line) + ": " + to_string(kind) +
                           (detail.empty() ? "" : ": " + detail)),
        kind_(kind),
        line_(line) {}

  ParseErrorKind kind() const { return kind_; }
  std::size_t line() const { return line_; }

 private:
  ParseErrorKind kind_;
  std::size_t line_;
};

namespace detail {

inline std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

struct SdpBlock {
  std::vector<std::string> comments;
  std::vector<std::pair<std::size_t, std::string>> lines;  // (line number, text)
};

inline SemanticGraph parse_sdp_block(const SdpBlock& block) {
  const std::size_t first_line = block.lines.front().first;
  std::vector<std::vector<std::string>> rows;
  rows.reserve(block.lines.size());
  std::size_t columns = 0;
  for (const auto& [line_no, text] : block.lines) {
    auto fields = split_tabs(text);
    if (fields.size() < 7) {
      throw ParseError(ParseErrorKind::malformed_columns, line_no,
                       "expected at least 7 columns, got " + std::to_string(fields.size()));
    }
    if (rows.empty()) {
      columns = fields.size();
    } else if (fields.size() != columns) {
      throw ParseError(ParseErrorKind::malformed_columns, line_no,
                       "expected " + std::to_string(columns) + " columns, got " +
                           std::to_string(fields.size()));
    }
    rows.push_back(std::move(fields));
  }

  std::vector<Token> tokens;
  std::vector<Position> predicates;
  std::vector<Position> tops;
  tokens.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& f = rows[k];
    const std::size_t line_no = block.lines[k].first;
    if (f[0] != std::to_string(k + 1)) {
      throw ParseError(ParseErrorKind::non_dense_ids, line_no,
                       "expected id " + std::to_string(k + 1) + ", got '" + f[0] + "'");
    }
    for (int c : {1, 2, 3, 6}) {
      if (f[static_cast<std::size_t>(c)].empty()) {
        throw ParseError(ParseErrorKind::malformed_field, line_no,
                         "empty column " + std::to_string(c + 1));
      }
    }
    if ((f[4] != "+" && f[4] != "-") || (f[5] != "+" && f[5] != "-")) {
      throw ParseError(ParseErrorKind::malformed_field, line_no, "top/pred flags must be + or -");
    }
    Token t;
    t.position = static_cast<Position>(k + 1);
    t.form = f[1];
    t.lemma = f[2];
    t.pos = f[3];
    t.frame = f[6];
    t.predicate = f[5] == "+";
    if (t.predicate) predicates.push_back(t.position);
    if (f[4] == "+") tops.push_back(t.position);
    tokens.push_back(std::move(t));
  }
  if (columns - 7 != predicates.size()) {
    throw ParseError(ParseErrorKind::predicate_mismatch, first_line,
                     std::to_string(predicates.size()) + " predicates but " +
                         std::to_string(columns - 7) + " argument columns");
  }

  SemanticGraph graph(Sentence(std::move(tokens), block.comments));
  try {
    for (Position d : tops) graph.add_arc(Arc{kRootPosition, d, std::string(kRootLabel)});
  } catch (const ContractViolation& e) {
    throw ParseError(ParseErrorKind::malformed_field, first_line, e.what());
  }
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const std::size_t line_no = block.lines[k].first;
    const auto dependent = static_cast<Position>(k + 1);
    for (std::size_t col = 0; col < predicates.size(); ++col) {
      const std::string& value = rows[k][7 + col];
      if (value == "_") continue;
      const Position head = predicates[col];
      if (head == dependent) {
        throw ParseError(ParseErrorKind::cyclic_graph, line_no,
                         "self loop on token " + std::to_string(dependent));
      }
      try {
        graph.add_arc(Arc{head, dependent, value});
      } catch (const ContractViolation& e) {
        throw ParseError(ParseErrorKind::malformed_field, line_no, e.what());
      }
    }
  }
  if (!is_acyclic(graph)) {
    throw ParseError(ParseErrorKind::cyclic_graph, first_line, "sentence graph has a cycle");
  }
  return graph;
}

}  // namespace detail

/// Reads blank-line separated SDP blocks. Comment lines ('#') are attached to
/// the sentence that follows them.
inline Corpus read_sdp_corpus(std::istream& in) {
  Corpus corpus;
  detail::SdpBlock block;
  std::string line;
  std::size_t line_no = 0;
  auto flush = [&] {
    if (!block.lines.empty()) corpus.push_back(detail::parse_sdp_block(block));
    block = {};
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
    } else if (line.front() == '#') {
      if (!block.lines.empty()) flush();
      block.comments.push_back(line);
    } else {
      block.lines.emplace_back(line_no, line);
    }
  }
  flush();
  return corpus;
}

inline void write_sdp_graph(const SemanticGraph& g, std::ostream& out) {
  const Sentence& s = g.sentence();
  for (const auto& c : s.comments()) out << c << '\n';
  std::vector<Position> predicates;
  for (const Token& t : s.tokens()) {
    if (t.predicate || g.has_outgoing(t.position)) predicates.push_back(t.position);
  }
  for (const Token& t : s.tokens()) {
    const bool pred = std::find(predicates.begin(), predicates.end(), t.position) != predicates.end();
    out << t.position << '\t' << t.form << '\t' << t.lemma << '\t' << t.pos << '\t'
        << (g.has_arc(kRootPosition, t.position) ? '+' : '-') << '\t' << (pred ? '+' : '-') << '\t'
        << t.frame;
    for (Position head : predicates) {
      const std::string* label = g.label(head, t.position);
      out << '\t' << (label ? *label : std::string("_"));
    }
    out << '\n';
  }
  out << '\n';
}

inline void write_sdp_corpus(const Corpus& graphs, std::ostream& out) {
  for (const auto& g : graphs) write_sdp_graph(g, out);
}

/// Line-delimited JSON format used for synthetic corpora.
inline Corpus read_jsonl_corpus(std::istream& in) {
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(ParseErrorKind::malformed_field, line_no, e.what());
    }
    try {
      std::vector<Token> tokens;
      const auto& toks = record.at("tokens");
      for (std::size_t k = 0; k < toks.size(); ++k) {
        Token t;
        t.position = static_cast<Position>(k + 1);
        t.form = toks[k].at(0).get<std::string>();
        t.lemma = toks[k].at(1).get<std::string>();
        t.pos = toks[k].at(2).get<std::string>();
        tokens.push_back(std::move(t));
      }
      std::vector<Arc> arcs;
      for (const auto& a : record.at("arcs")) {
        arcs.push_back(Arc{a.at(0).get<Position>(), a.at(1).get<Position>(),
                           a.at(2).get<std::string>()});
      }
      SemanticGraph g(Sentence(std::move(tokens)));
      for (auto& a : arcs) {
        if (a.head == a.dependent) {
          throw ParseError(ParseErrorKind::cyclic_graph, line_no, "self loop");
        }
        g.add_arc(std::move(a));
      }
      if (!is_acyclic(g)) throw ParseError(ParseErrorKind::cyclic_graph, line_no, "");
      corpus.push_back(std::move(g));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(ParseErrorKind::malformed_field, line_no, e.what());
    } catch (const ContractViolation& e) {
      throw ParseError(ParseErrorKind::malformed_field, line_no, e.what());
    }
  }
  return corpus;
}

inline void write_jsonl_corpus(const Corpus& graphs, std::ostream& out) {
  for (const auto& g : graphs) {
    nlohmann::json record;
    record["tokens"] = nlohmann::json::array();
    for (const Token& t : g.sentence().tokens()) {
      record["tokens"].push_back({t.form, t.lemma, t.pos});
    }
    record["arcs"] = nlohmann::json::array();
    for (const Arc& a : g.arcs()) record["arcs"].push_back({a.head, a.dependent, a.label});
    out << record.dump() << '\n';
  }
}

inline bool is_jsonl_path(const std::string& path) {
  return path.size() >= 6 && path.compare(path.size() - 6, 6, ".jsonl") == 0;
}

/// Picks the format from the file extension (".jsonl" or SDP otherwise).
inline Corpus read_corpus_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return is_jsonl_path(path) ? read_jsonl_corpus(in) : read_sdp_corpus(in);
}

inline void write_corpus_file(const Corpus& graphs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  if (is_jsonl_path(path)) {
    write_jsonl_corpus(graphs, out);
  } else {
    write_sdp_corpus(graphs, out);
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace sdp
