// Command-line front end: embedding inspection, feature extraction, training,
// evaluation, the full configuration matrix and synthetic corpora.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "incongruity/classifier.hpp"
#include "incongruity/embedding_store.hpp"
#include "incongruity/errors.hpp"
#include "incongruity/harness.hpp"
#include "incongruity/prior_features.hpp"
#include "incongruity/synthetic.hpp"

namespace fs = std::filesystem;
using namespace incongruity;

namespace {

// Creates the parent directory of an output path and returns the path.
const std::string& prepare_output(const std::string& path) {
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  return path;
}

struct CommonOptions {
  std::uint64_t seed = 0;
  std::size_t folds = 5;
  double c = 20.0;
  double w = 3.0;
  int epochs = 20;
  unsigned jobs = 1;
  std::string stopwords;
  std::vector<std::string> lexicons;
  std::string casing = "exact_then_lowercase";
  double distance_exponent = 2.0;
  std::string embeddings_dir;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--seed", o.seed, "Seed for splits and training")->capture_default_str();
  cmd->add_option("--folds", o.folds, "Cross-validation folds")->capture_default_str();
  cmd->add_option("--c", o.c, "Regularization trade-off")->capture_default_str();
  cmd->add_option("--w", o.w, "Positive-class loss weight")->capture_default_str();
  cmd->add_option("--epochs", o.epochs, "SGD epochs")->capture_default_str();
  cmd->add_option("--stopwords", o.stopwords, "Stopword file (default: built-in list)");
  cmd->add_option("--lexicon", o.lexicons, "Lexicon file(s), merged (default: built-in lexicon)");
  cmd->add_option("--casing", o.casing, "exact | lowercase | exact_then_lowercase")->capture_default_str();
  cmd->add_option("--distance-exponent", o.distance_exponent, "Exponent of the WS distance weight")
      ->capture_default_str();
}

void add_embeddings_dir(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--embeddings", o.embeddings_dir,
                  "Directory of embedding files (*.bin binary, *.txt/*.vec text); default $INCONGRUITY_EMBED_DIR");
}

std::vector<fs::path> embedding_files(const std::string& dir_option) {
  std::string dir = dir_option;
  if (dir.empty()) {
    if (const char* env = std::getenv("INCONGRUITY_EMBED_DIR")) dir = env;
  }
  if (dir.empty()) return {};
  if (!fs::is_directory(dir)) throw ConfigError("embedding directory '" + dir + "' does not exist");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".bin" || ext == ".txt" || ext == ".vec")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

Resources make_resources(const CommonOptions& o, bool load_embeddings_now) {
  Resources r;
  if (!o.stopwords.empty()) r.stopwords = StopwordList::load(o.stopwords);
  if (!o.lexicons.empty()) {
    r.lexicon = Lexicon::load(o.lexicons.front());
    for (std::size_t i = 1; i < o.lexicons.size(); ++i) r.lexicon.merge(Lexicon::load(o.lexicons[i]));
  }
  r.embedding_options.casing = parse_casing_policy(o.casing);
  r.embedding_options.distance_exponent = o.distance_exponent;
  if (load_embeddings_now) {
    for (const auto& path : embedding_files(o.embeddings_dir)) {
      std::cerr << "loading " << path << "\n";
      auto table = load_embeddings(path);
      r.embeddings.emplace(table.name(), std::move(table));
    }
  }
  return r;
}

HarnessOptions harness_options(const CommonOptions& o) {
  HarnessOptions h;
  h.folds = o.folds;
  h.seed = o.seed;
  h.train.c = o.c;
  h.train.w = o.w;
  h.train.epochs = o.epochs;
  h.train.seed = o.seed;
  h.jobs = o.jobs;
  return h;
}

void print_metrics(const std::string& label, const Metrics& m) {
  std::cout << label << "\tP=" << format_fixed(m.precision, 2) << "\tR=" << format_fixed(m.recall, 2)
            << "\tF=" << format_fixed(m.f, 2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Word-embedding incongruity features for sarcasm detection"};
  app.require_subcommand(1);
  CommonOptions opts;

  // load-embeddings
  std::string emb_path, emb_format;
  auto* load_cmd = app.add_subcommand("load-embeddings", "Load an embedding file and print a summary");
  load_cmd->add_option("path", emb_path, "Embedding file")->required();
  load_cmd->add_option("--format", emb_format, "binary_w2v | text_vectors (default: by extension)");

  // intersect-vocab
  std::vector<std::string> intersect_inputs;
  std::string intersect_out;
  auto* intersect_cmd = app.add_subcommand("intersect-vocab", "Restrict embedding files to their shared vocabulary");
  intersect_cmd->add_option("inputs", intersect_inputs, "Embedding files (default: all files in --embeddings)");
  intersect_cmd->add_option("--out", intersect_out, "Output directory for <name>.txt files")->required();
  add_embeddings_dir(intersect_cmd, opts);

  // extract-features
  std::string config_text, dataset_path, features_out;
  auto* extract_cmd = app.add_subcommand("extract-features", "Write named feature values per instance");
  extract_cmd->add_option("--config", config_text, "Configuration, e.g. L+S:word2vec")->required();
  extract_cmd->add_option("--dataset", dataset_path, "Dataset (TSV or JSONL)")->required();
  extract_cmd->add_option("--out", features_out, "Output file (default: stdout)");
  add_common(extract_cmd, opts);
  add_embeddings_dir(extract_cmd, opts);

  // train
  std::string model_path;
  auto* train_cmd = app.add_subcommand("train", "Train one configuration on a whole dataset");
  train_cmd->add_option("--config", config_text, "Configuration, e.g. J+S+WS:glove")->required();
  train_cmd->add_option("--dataset", dataset_path, "Dataset (TSV or JSONL)")->required();
  train_cmd->add_option("--model", model_path, "Output model file")->required();
  add_common(train_cmd, opts);
  add_embeddings_dir(train_cmd, opts);

  // evaluate
  std::string predictions_out;
  auto* eval_cmd = app.add_subcommand(
      "evaluate", "Score a trained model on a dataset, or cross-validate a configuration when --model is absent");
  eval_cmd->add_option("--config", config_text, "Configuration, e.g. B+WS:lsa")->required();
  eval_cmd->add_option("--dataset", dataset_path, "Dataset (TSV or JSONL)")->required();
  eval_cmd->add_option("--model", model_path, "Trained model file");
  eval_cmd->add_option("--predictions", predictions_out, "Write per-instance predictions (TSV)");
  add_common(eval_cmd, opts);
  add_embeddings_dir(eval_cmd, opts);

  // run-matrix
  std::string report_path, report_format = "markdown";
  bool intersect = false;
  auto* matrix_cmd = app.add_subcommand("run-matrix", "Cross-validate every prior set x augmentation x embedding");
  matrix_cmd->add_option("--dataset", dataset_path, "Dataset (TSV or JSONL)")->required();
  matrix_cmd->add_flag("--intersect", intersect, "Restrict embeddings to their shared vocabulary first");
  matrix_cmd->add_option("--report", report_path, "Report output file")->required();
  matrix_cmd->add_option("--format", report_format, "markdown | tsv")->capture_default_str();
  matrix_cmd->add_option("--jobs", opts.jobs, "Concurrent matrix cells")->capture_default_str();
  add_common(matrix_cmd, opts);
  add_embeddings_dir(matrix_cmd, opts);

  // gen-synthetic
  SyntheticSpec spec;
  std::string synth_out, synth_emb_out;
  auto* synth_cmd = app.add_subcommand("gen-synthetic", "Generate a synthetic labeled corpus and its toy embedding");
  synth_cmd->add_option("--n", spec.n, "Number of instances")->capture_default_str();
  synth_cmd->add_option("--skew", spec.skew, "Fraction of sarcastic instances")->capture_default_str();
  synth_cmd->add_option("--seed", spec.seed, "Random seed")->capture_default_str();
  synth_cmd->add_option("--separability", spec.separability, "Fraction of patterned sarcastic sentences")
      ->capture_default_str();
  synth_cmd->add_flag("--marker", spec.marker, "Prefix sarcastic sentences with a give-away phrase");
  synth_cmd->add_option("--out", synth_out, "Dataset TSV (default: stdout)");
  synth_cmd->add_option("--embeddings-out", synth_emb_out, "Write the toy embedding (text format)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*load_cmd) {
      const auto format = emb_format.empty() ? format_from_path(emb_path) : parse_embedding_format(emb_format);
      const auto table = load_embeddings(emb_path, format);
      std::cout << "name\t" << table.name() << "\nformat\t" << to_string(format) << "\ndimension\t"
                << table.dimension() << "\nvocabulary\t" << table.size() << "\n";
      return 0;
    }

    if (*intersect_cmd) {
      std::vector<fs::path> paths(intersect_inputs.begin(), intersect_inputs.end());
      if (paths.empty()) paths = embedding_files(opts.embeddings_dir);
      if (paths.empty()) throw ConfigError("no embedding files given");
      std::vector<EmbeddingTable> tables;
      for (const auto& p : paths) tables.push_back(load_embeddings(p));
      const auto reduced = intersect_vocabularies(tables);
      fs::create_directories(intersect_out);
      for (const auto& t : reduced) {
        save_text_embeddings(t, fs::path(intersect_out) / (t.name() + ".txt"));
        std::cout << t.name() << "\t" << t.size() << "\n";
      }
      return 0;
    }

    if (*synth_cmd) {
      const auto corpus = generate_synthetic(spec);
      if (synth_out.empty()) {
        for (const auto& inst : corpus.instances) {
          std::cout << inst.id << '\t' << (inst.sarcastic ? 1 : 0) << '\t' << inst.text << '\n';
        }
      } else {
        save_dataset(corpus.instances, prepare_output(synth_out));
      }
      if (!synth_emb_out.empty()) save_text_embeddings(corpus.embeddings, prepare_output(synth_emb_out));
      return 0;
    }

    const auto config = parse_experiment_config(config_text.empty() ? "L" : config_text);
    const bool needs_embeddings = *matrix_cmd || !config.embedding.empty();
    const Resources resources = make_resources(opts, needs_embeddings);
    const auto instances = load_dataset(dataset_path);
    const auto hopts = harness_options(opts);

    if (*matrix_cmd) {
      const auto matrix = run_matrix(instances, resources, intersect, hopts);
      const auto gains = compute_gains(matrix);
      const auto format = report_format == "tsv" ? ReportFormat::tsv : ReportFormat::markdown;
      std::ofstream out(prepare_output(report_path), std::ios::binary);
      if (!out) throw ConfigError("cannot write " + report_path);
      out << emit_report(matrix, gains, format);
      for (const auto& emb : matrix.embeddings) {
        std::cout << emb << "\tmean F gain " << format_fixed(gains.by_embedding.at(emb), 3) << "\n";
      }
      return 0;
    }

    resources.validate(config);
    const auto corpus = PreparedCorpus::from(instances);
    const auto features = extract_all(corpus, config, resources);

    if (*extract_cmd) {
      std::ofstream file;
      if (!features_out.empty()) file.open(prepare_output(features_out), std::ios::binary);
      std::ostream& out = features_out.empty() ? std::cout : file;
      for (std::size_t i = 0; i < instances.size(); ++i) {
        out << instances[i].id << '\t' << (instances[i].sarcastic ? 1 : 0);
        for (const auto& [name, value] : features[i]) out << '\t' << name << '=' << value;
        out << '\n';
      }
      return 0;
    }

    if (*train_cmd) {
      FeatureRegistry registry;
      std::vector<LabeledVector> train_set;
      for (std::size_t i = 0; i < instances.size(); ++i) {
        train_set.push_back({registry.encode(features[i]), corpus.labels[i]});
      }
      auto model = train(train_set, hopts.train, registry.size());
      model.feature_names.resize(model.weights.size());
      for (FeatureId id = 0; id < registry.size(); ++id) model.feature_names[id] = registry.name(id);
      save_model(model, prepare_output(model_path));
      Confusion c;
      for (const auto& inst : train_set) {
        const auto p = predict(model, inst.features);
        if (p.positive && inst.positive) ++c.tp;
        else if (p.positive) ++c.fp;
        else if (inst.positive) ++c.fn;
        else ++c.tn;
      }
      print_metrics(config.key() + " (training set)", Metrics::from(c));
      return 0;
    }

    if (*eval_cmd) {
      std::ofstream pred_file;
      if (!predictions_out.empty()) {
        pred_file.open(prepare_output(predictions_out), std::ios::binary);
        pred_file << "id\tfold\tscore\tpredicted\tactual\n";
      }
      if (model_path.empty()) {
        const auto report = run_config(config, corpus, resources, hopts);
        for (std::size_t f = 0; f < report.folds.size(); ++f) print_metrics("fold " + std::to_string(f), report.folds[f]);
        print_metrics(config.key() + " pooled", report.pooled);
        if (pred_file) {
          for (const auto& p : report.predictions) {
            pred_file << instances[p.index].id << '\t' << p.fold << '\t' << p.score << '\t' << p.predicted << '\t'
                      << p.actual << '\n';
          }
        }
        return 0;
      }
      const auto model = load_model(model_path);
      FeatureRegistry registry;
      for (std::size_t k = 0; k < model.feature_names.size(); ++k) {
        const auto& name = model.feature_names[k];
        registry.intern(name.empty() ? "\x01unused." + std::to_string(k) : name);
      }
      registry.freeze();
      Confusion c;
      for (std::size_t i = 0; i < instances.size(); ++i) {
        const auto p = predict(model, registry.encode(features[i]));
        const bool actual = corpus.labels[i];
        if (p.positive && actual) ++c.tp;
        else if (p.positive) ++c.fp;
        else if (actual) ++c.fn;
        else ++c.tn;
        if (pred_file) pred_file << instances[i].id << "\t-\t" << p.score << '\t' << p.positive << '\t' << actual << '\n';
      }
      print_metrics(config.key(), Metrics::from(c));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
