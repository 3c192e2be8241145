#pragma once

// Precomputed contextual vectors: one line of whitespace-separated floats per
// token, a blank line after each sentence. Subword pooling is the producer's
// job; vectors are concatenated to the word input as-is and never trained.

#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdp/graph.hpp"
#include "sdp/scorer.hpp"
#include "sdp/train.hpp"

namespace sdp {

inline CorpusVectors read_external_embeddings(std::istream& in, const Corpus& corpus, int dim) {
  CorpusVectors out;
  std::vector<Vector> current;
  std::string line;
  std::size_t line_no = 0;
  auto close_sentence = [&] {
    const std::size_t k = out.size();
    if (k >= corpus.size()) {
      throw ShapeError("line " + std::to_string(line_no) + ": more sentences than the corpus has (" +
                       std::to_string(corpus.size()) + ")");
    }
    if (current.size() != corpus[k].size()) {
      throw ShapeError("line " + std::to_string(line_no) + ": sentence " + std::to_string(k + 1) + " has " +
                       std::to_string(current.size()) + " vectors for " + std::to_string(corpus[k].size()) +
                       " tokens");
    }
    out.push_back(std::move(current));
    current.clear();
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      if (!current.empty()) close_sentence();
      continue;
    }
    std::istringstream fields(line);
    std::vector<double> values;
    double x = 0;
    while (fields >> x) values.push_back(x);
    if (!fields.eof()) throw ShapeError("line " + std::to_string(line_no) + ": not a number");
    if (static_cast<int>(values.size()) != dim) {
      throw ShapeError("line " + std::to_string(line_no) + ": vector of dimension " +
                       std::to_string(values.size()) + ", expected " + std::to_string(dim));
    }
    current.push_back(Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size())));
  }
  if (!current.empty()) close_sentence();
  if (out.size() != corpus.size()) {
    throw ShapeError("external embeddings cover " + std::to_string(out.size()) + " sentences, corpus has " +
                     std::to_string(corpus.size()));
  }
  return out;
}

inline CorpusVectors load_external_embeddings(const std::string& path, const Corpus& corpus, int dim) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_external_embeddings(in, corpus, dim);
}

inline void write_external_embeddings(const CorpusVectors& vectors, std::ostream& out) {
  for (const auto& sentence : vectors) {
    for (const auto& v : sentence) {
      for (Eigen::Index k = 0; k < v.size(); ++k) out << (k ? " " : "") << v(k);
      out << '\n';
    }
    out << '\n';
  }
}

}  // namespace sdp
