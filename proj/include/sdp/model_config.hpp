#pragma once

/*! \file
 *  \brief Scorer hyper-parameters and their key-value file format.
 *
 *  Config files hold one `key = value` pair per line; '#' starts a comment.
 *  Unknown keys are rejected so that typos do not silently fall back to
 *  defaults. See configs/full_scale.cfg for the complete key list.
 */

#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace sdp {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelConfig {
  // Embeddings; 0 disables lemma, POS or character inputs.
  int word_dim = 16;
  int lemma_dim = 16;
  int pos_dim = 16;
  int char_dim = 8;
  int cnn_window = 3;
  int cnn_filters = 16;
  int external_dim = 0;

  int encoder_layers = 1;
  int encoder_size = 32;  // per direction
  int decoder_layers = 1;
  int decoder_size = 32;
  int arc_mlp_size = 32;
  int label_mlp_size = 16;

  double embedding_dropout = 0.33;
  double lstm_dropout = 0.33;
  double unk_replacement = 0.5;

  double learning_rate = 0.005;
  double beta1 = 0.9;
  double beta2 = 0.9;
  double adam_epsilon = 1e-8;
  int batch_size = 4;
  double decay_rate = 0.75;
  int decay_patience = 10;
  double gradient_clip = 5.0;
  int epochs = 200;
  int beam_size = 5;
  int dev_beam_size = 1;
  std::uint64_t seed = 1;

  int input_dim() const {
    return word_dim + lemma_dim + pos_dim + (char_dim > 0 ? cnn_filters : 0) + external_dim;
  }

  void validate() const {
    auto positive = [](int v, const char* name) {
      if (v < 1) throw ConfigError(std::string(name) + " must be >= 1");
    };
    auto non_negative = [](int v, const char* name) {
      if (v < 0) throw ConfigError(std::string(name) + " must be >= 0");
    };
    auto probability = [](double v, const char* name) {
      if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
    };
    positive(word_dim, "word_dim");
    non_negative(lemma_dim, "lemma_dim");
    non_negative(pos_dim, "pos_dim");
    non_negative(char_dim, "char_dim");
    non_negative(external_dim, "external_dim");
    if (char_dim > 0) {
      positive(cnn_filters, "cnn_filters");
      positive(cnn_window, "cnn_window");
      if (cnn_window % 2 == 0) throw ConfigError("cnn_window must be odd");
    }
    positive(encoder_layers, "encoder_layers");
    positive(encoder_size, "encoder_size");
    positive(decoder_layers, "decoder_layers");
    positive(decoder_size, "decoder_size");
    positive(arc_mlp_size, "arc_mlp_size");
    positive(label_mlp_size, "label_mlp_size");
    positive(batch_size, "batch_size");
    positive(beam_size, "beam_size");
    positive(dev_beam_size, "dev_beam_size");
    non_negative(epochs, "epochs");
    positive(decay_patience, "decay_patience");
    probability(embedding_dropout, "embedding_dropout");
    probability(lstm_dropout, "lstm_dropout");
    probability(unk_replacement, "unk_replacement");
    probability(beta1, "beta1");
    probability(beta2, "beta2");
    probability(decay_rate, "decay_rate");
    if (!(learning_rate >= 0.0)) throw ConfigError("learning_rate must be >= 0");
    if (!(adam_epsilon > 0.0)) throw ConfigError("adam_epsilon must be > 0");
    if (!(gradient_clip > 0.0)) throw ConfigError("gradient_clip must be > 0");
  }
};

namespace detail {

template <typename Fn>
void for_each_config_field(ModelConfig& c, Fn&& fn) {
  fn("word_dim", c.word_dim);
  fn("lemma_dim", c.lemma_dim);
  fn("pos_dim", c.pos_dim);
  fn("char_dim", c.char_dim);
  fn("cnn_window", c.cnn_window);
  fn("cnn_filters", c.cnn_filters);
  fn("external_dim", c.external_dim);
  fn("encoder_layers", c.encoder_layers);
  fn("encoder_size", c.encoder_size);
  fn("decoder_layers", c.decoder_layers);
  fn("decoder_size", c.decoder_size);
  fn("arc_mlp_size", c.arc_mlp_size);
  fn("label_mlp_size", c.label_mlp_size);
  fn("embedding_dropout", c.embedding_dropout);
  fn("lstm_dropout", c.lstm_dropout);
  fn("unk_replacement", c.unk_replacement);
  fn("learning_rate", c.learning_rate);
  fn("beta1", c.beta1);
  fn("beta2", c.beta2);
  fn("adam_epsilon", c.adam_epsilon);
  fn("batch_size", c.batch_size);
  fn("decay_rate", c.decay_rate);
  fn("decay_patience", c.decay_patience);
  fn("gradient_clip", c.gradient_clip);
  fn("epochs", c.epochs);
  fn("beam_size", c.beam_size);
  fn("dev_beam_size", c.dev_beam_size);
  fn("seed", c.seed);
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  T value{};
  in >> value;
  if (!in || !(in >> std::ws).eof()) throw ConfigError("bad value for " + key + ": '" + text + "'");
  return value;
}

}  // namespace detail

inline ModelConfig parse_model_config(std::istream& in, ModelConfig base = {}) {
  std::map<std::string, std::string> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    entries[detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
  }
  detail::for_each_config_field(base, [&](const char* key, auto& field) {
    const auto it = entries.find(key);
    if (it == entries.end()) return;
    field = detail::parse_value<std::remove_reference_t<decltype(field)>>(key, it->second);
    entries.erase(it);
  });
  if (!entries.empty()) throw ConfigError("unknown config key '" + entries.begin()->first + "'");
  base.validate();
  return base;
}

inline ModelConfig load_model_config(const std::string& path, ModelConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  return parse_model_config(in, base);
}

inline void write_model_config(const ModelConfig& config, std::ostream& out) {
  ModelConfig copy = config;
  detail::for_each_config_field(copy, [&](const char* key, const auto& field) {
    out << key << " = " << field << '\n';
  });
}

inline nlohmann::json to_json(const ModelConfig& config) {
  nlohmann::json j;
  ModelConfig copy = config;
  detail::for_each_config_field(copy, [&](const char* key, const auto& field) { j[key] = field; });
  return j;
}

inline ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  detail::for_each_config_field(c, [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  });
  c.validate();
  return c;
}

}  // namespace sdp
