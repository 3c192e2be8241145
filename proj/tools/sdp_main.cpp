// Command-line front end: oracle extraction, training, parsing, evaluation,
// transition statistics and synthetic corpus generation.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
// Logs go to stderr; data goes to files or stdout.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sdp/sdp.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

struct RunConfig {
  std::string input;
  std::string second_input;
  std::string output;
  std::string model_path;
  std::string config_path;
  std::string dev_path;
  std::string external_path;
  std::string dev_external_path;
  std::string formalism = "synthetic";
  std::string mode = "oracle";
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;
  int beam = 0;
  int jobs = 1;
  bool verify = false;

  std::size_t sentences = 100;
  std::size_t min_length = 5;
  std::size_t max_length = 30;
  std::optional<double> arc_ratio;
  std::optional<double> singletons;
  std::size_t vocabulary = 200;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes to the named file, or stdout when the name is empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw UsageError("cannot open " + path + " for writing");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::string fixed(double x, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
  return buf;
}

sdp::CorpusVectors external_for(const std::string& path, const sdp::Corpus& corpus, int dim) {
  if (path.empty()) {
    if (dim > 0) throw UsageError("model expects external embeddings (--external-emb)");
    return {};
  }
  if (dim == 0) throw UsageError("--external-emb given but the model has external_dim = 0");
  return sdp::load_external_embeddings(path, corpus, dim);
}

std::vector<sdp::Sentence> sentences_of(const sdp::Corpus& corpus) {
  std::vector<sdp::Sentence> out;
  out.reserve(corpus.size());
  for (const auto& g : corpus) out.push_back(g.sentence());
  return out;
}

sdp::PointerModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open model " + path);
  return sdp::PointerModel::load(in);
}

int cmd_oracle(const RunConfig& rc) {
  const sdp::Corpus corpus = sdp::read_corpus_file(rc.input);
  Output out(rc.output);
  std::size_t mismatches = 0;
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const auto seq = sdp::oracle(corpus[k]);
    sdp::write_transitions(seq, out.stream());
    if (rc.verify && !(sdp::replay(corpus[k].sentence_ptr(), seq) == corpus[k])) {
      std::cerr << "sentence " << k + 1 << ": replay differs from the input graph\n";
      ++mismatches;
    }
  }
  if (rc.verify) {
    std::cerr << "verified " << corpus.size() << " sentences, " << mismatches << " mismatches\n";
  }
  return mismatches == 0 ? kOk : kData;
}

int cmd_train(const RunConfig& rc) {
  sdp::ModelConfig config;
  if (!rc.config_path.empty()) config = sdp::load_model_config(rc.config_path);
  if (rc.seed) config.seed = *rc.seed;
  if (rc.epochs) config.epochs = *rc.epochs;
  config.validate();

  const sdp::Corpus corpus = sdp::read_corpus_file(rc.input);
  if (corpus.empty()) throw UsageError("training corpus " + rc.input + " is empty");
  std::optional<sdp::Corpus> dev;
  if (!rc.dev_path.empty()) dev = sdp::read_corpus_file(rc.dev_path);
  const auto train_ext = external_for(rc.external_path, corpus, config.external_dim);
  sdp::CorpusVectors dev_ext;
  if (dev) dev_ext = external_for(rc.dev_external_path, *dev, config.external_dim);

  std::cerr << "# formalism " << rc.formalism << ", " << corpus.size() << " training sentences\n";
  std::cerr << "epoch\tloss\tdev_lf1\tlearning_rate\n";
  sdp::TrainOptions options;
  options.dev = dev ? &*dev : nullptr;
  options.train_external = config.external_dim > 0 ? &train_ext : nullptr;
  options.dev_external = config.external_dim > 0 && dev ? &dev_ext : nullptr;
  options.on_epoch = [](const sdp::EpochMetrics& m) {
    std::cerr << m.epoch << '\t' << fixed(m.loss, 6) << '\t'
              << (m.dev_lf1 ? fixed(100.0 * *m.dev_lf1, 2) : std::string("-")) << '\t' << m.learning_rate
              << '\n';
  };
  const sdp::TrainResult result = sdp::train(corpus, config, options);
  std::ofstream out(rc.model_path);
  if (!out) throw UsageError("cannot open " + rc.model_path + " for writing");
  result.model.save(out);
  std::cerr << "# saved epoch " << result.best_epoch << " to " << rc.model_path << '\n';
  return kOk;
}

int cmd_parse(const RunConfig& rc) {
  const sdp::PointerModel model = load_model(rc.model_path);
  const sdp::Corpus corpus = sdp::read_corpus_file(rc.input);
  const auto ext = external_for(rc.external_path, corpus, model.config().external_dim);
  const std::size_t beam = rc.beam > 0 ? static_cast<std::size_t>(rc.beam)
                                       : static_cast<std::size_t>(model.config().beam_size);
  const auto decoded = sdp::parse_corpus(model, sentences_of(corpus), beam, ext,
                                         static_cast<std::size_t>(std::max(1, rc.jobs)));
  sdp::Corpus graphs;
  graphs.reserve(decoded.size());
  for (const auto& d : decoded) graphs.push_back(d.graph);
  if (rc.output.empty() || rc.output == "-") {
    sdp::write_sdp_corpus(graphs, std::cout);
  } else {
    sdp::write_corpus_file(graphs, rc.output);
  }
  return kOk;
}

int cmd_eval(const RunConfig& rc) {
  const sdp::Corpus pred = sdp::read_corpus_file(rc.input);
  const sdp::Corpus gold = sdp::read_corpus_file(rc.second_input);
  std::cout << sdp::format_eval_table(sdp::evaluate(pred, gold));
  return kOk;
}

int cmd_stats(const RunConfig& rc) {
  const sdp::Corpus corpus = sdp::read_corpus_file(rc.input);
  sdp::TransitionStats stats;
  if (rc.mode == "oracle") {
    stats = sdp::oracle_transition_stats(corpus);
  } else {
    if (rc.model_path.empty()) throw UsageError("--mode model needs --model");
    const sdp::PointerModel model = load_model(rc.model_path);
    const auto ext = external_for(rc.external_path, corpus, model.config().external_dim);
    const std::size_t beam = rc.beam > 0 ? static_cast<std::size_t>(rc.beam)
                                         : static_cast<std::size_t>(model.config().beam_size);
    stats = sdp::model_transition_stats(model, corpus, beam, ext, static_cast<std::size_t>(std::max(1, rc.jobs)));
  }
  Output out(rc.output);
  auto& os = out.stream();
  os << "sentence_id\tn\ttransitions\n";
  for (const auto& r : stats.rows) os << r.id << '\t' << r.length << '\t' << r.transitions << '\n';
  os << "#summary";
  if (stats.fit) {
    os << "\tslope=" << fixed(stats.fit->slope, 4) << "\tintercept=" << fixed(stats.fit->intercept, 4)
       << "\tr2=" << fixed(stats.fit->r_squared, 4);
  } else {
    os << "\tslope=NA\tintercept=NA\tr2=NA";
  }
  os << "\tarcs_per_word=" << fixed(stats.arcs_per_word, 4)
     << "\tsingleton_pct=" << fixed(100.0 * stats.singleton_share, 1) << '\n';
  return kOk;
}

int cmd_synth(const RunConfig& rc) {
  sdp::SynthOptions o;
  o.sentences = rc.sentences;
  o.min_length = rc.min_length;
  o.max_length = rc.max_length;
  o.vocabulary = rc.vocabulary;
  o.seed = rc.seed.value_or(1);
  if (!rc.preset.empty()) {
    bool found = false;
    for (const auto& p : sdp::kSynthPresets) {
      if (rc.preset == p.name) {
        o.arc_ratio = p.arc_ratio;
        o.singleton_share = p.singleton_share;
        found = true;
      }
    }
    if (!found) throw UsageError("unknown preset '" + rc.preset + "' (dm, pas, psd)");
  }
  if (rc.arc_ratio) o.arc_ratio = *rc.arc_ratio;
  if (rc.singletons) o.singleton_share = *rc.singletons;
  if (!rc.preset.empty() || rc.arc_ratio || rc.singletons) {
    // explicit settings above
  } else {
    throw UsageError("synth needs --arc-ratio or --preset");
  }
  try {
    const sdp::Corpus corpus = sdp::synth_corpus(o);
    if (rc.output.empty() || rc.output == "-") {
      if (sdp::is_jsonl_path(rc.output)) {
        sdp::write_jsonl_corpus(corpus, std::cout);
      } else {
        sdp::write_sdp_corpus(corpus, std::cout);
      }
    } else {
      sdp::write_corpus_file(corpus, rc.output);
      // Round-trip through the reader so that anything written is loadable.
      (void)sdp::read_corpus_file(rc.output);
    }
  } catch (const sdp::InfeasibleSynthOptions& e) {
    throw UsageError(std::string("infeasible synth options: ") + e.what());
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transition-based semantic dependency parsing with a pointer scorer"};
  app.require_subcommand(1);
  RunConfig rc;

  auto* oracle = app.add_subcommand("oracle", "Write the static-oracle transition sequence of every sentence");
  oracle->add_option("corpus", rc.input, "Input corpus (.sdp or .jsonl)")->required()->check(CLI::ExistingFile);
  oracle->add_option("-o,--output", rc.output, "Output file (default stdout)");
  oracle->add_flag("--verify", rc.verify, "Replay every sequence and compare with the input graph");

  auto* train = app.add_subcommand("train", "Train a pointer scorer");
  train->add_option("corpus", rc.input, "Training corpus")->required()->check(CLI::ExistingFile);
  train->add_option("--dev", rc.dev_path, "Development corpus for model selection")->check(CLI::ExistingFile);
  train->add_option("--config", rc.config_path, "Hyper-parameter file")->check(CLI::ExistingFile);
  train->add_option("-m,--model", rc.model_path, "Where to write the model")->required();
  train->add_option("--seed", rc.seed, "Random seed (overrides the config)");
  train->add_option("--epochs", rc.epochs, "Epochs (overrides the config)");
  train->add_option("--external-emb", rc.external_path, "External vectors for the training corpus")
      ->check(CLI::ExistingFile);
  train->add_option("--dev-external-emb", rc.dev_external_path, "External vectors for the dev corpus")
      ->check(CLI::ExistingFile);
  train->add_option("--formalism", rc.formalism, "Formalism tag (metadata only)")
      ->check(CLI::IsMember({"DM", "PAS", "PSD", "synthetic"}));

  auto* parse = app.add_subcommand("parse", "Parse a corpus with a trained model");
  parse->add_option("corpus", rc.input, "Sentences to parse (arcs are ignored)")->required()->check(CLI::ExistingFile);
  parse->add_option("-m,--model", rc.model_path, "Model file")->required()->check(CLI::ExistingFile);
  parse->add_option("-o,--output", rc.output, "Output SDP file (default stdout)");
  parse->add_option("--beam", rc.beam, "Beam width; 1 is greedy (default: model config, 5)")
      ->check(CLI::NonNegativeNumber);
  parse->add_option("--jobs", rc.jobs, "Worker threads")->check(CLI::PositiveNumber);
  parse->add_option("--external-emb", rc.external_path, "External vectors")->check(CLI::ExistingFile);

  auto* eval = app.add_subcommand("eval", "Score predicted graphs against gold graphs");
  eval->add_option("predicted", rc.input, "Predicted corpus")->required()->check(CLI::ExistingFile);
  eval->add_option("gold", rc.second_input, "Gold corpus")->required()->check(CLI::ExistingFile);

  auto* stats = app.add_subcommand("stats", "Transition counts against sentence length, with a linear fit");
  stats->add_option("corpus", rc.input, "Input corpus")->required()->check(CLI::ExistingFile);
  stats->add_option("--mode", rc.mode, "oracle or model")->check(CLI::IsMember({"oracle", "model"}));
  stats->add_option("-m,--model", rc.model_path, "Model file for --mode model")->check(CLI::ExistingFile);
  stats->add_option("--beam", rc.beam, "Beam width for --mode model")->check(CLI::NonNegativeNumber);
  stats->add_option("--jobs", rc.jobs, "Worker threads")->check(CLI::PositiveNumber);
  stats->add_option("--external-emb", rc.external_path, "External vectors")->check(CLI::ExistingFile);
  stats->add_option("-o,--output", rc.output, "Output file (default stdout)");

  auto* synth = app.add_subcommand("synth", "Generate a random labelled DAG corpus");
  synth->add_option("--sentences", rc.sentences, "Number of sentences")->check(CLI::PositiveNumber);
  synth->add_option("--min-length", rc.min_length, "Shortest sentence")->check(CLI::PositiveNumber);
  synth->add_option("--max-length", rc.max_length, "Longest sentence")->check(CLI::PositiveNumber);
  synth->add_option("--arc-ratio", rc.arc_ratio, "Arcs per word")->check(CLI::NonNegativeNumber);
  synth->add_option("--singletons", rc.singletons, "Share of words without arcs")->check(CLI::Range(0.0, 1.0));
  synth->add_option("--preset", rc.preset, "dm, pas or psd statistics")->check(CLI::IsMember({"dm", "pas", "psd"}));
  synth->add_option("--vocabulary", rc.vocabulary, "Distinct word forms")->check(CLI::PositiveNumber);
  synth->add_option("--seed", rc.seed, "Random seed");
  synth->add_option("-o,--output", rc.output, "Output file (.sdp or .jsonl; default stdout as SDP)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (oracle->parsed()) return cmd_oracle(rc);
    if (train->parsed()) return cmd_train(rc);
    if (parse->parsed()) return cmd_parse(rc);
    if (eval->parsed()) return cmd_eval(rc);
    if (stats->parsed()) return cmd_stats(rc);
    if (synth->parsed()) return cmd_synth(rc);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const sdp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const sdp::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}
