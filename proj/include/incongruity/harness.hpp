#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "incongruity/classifier.hpp"
#include "incongruity/prior_features.hpp"

namespace incongruity {

struct LabeledInstance {
  std::string id;
  std::string text;
  bool sarcastic = false;

  bool operator==(const LabeledInstance&) const = default;
};

// TSV "<id>\t<0|1>\t<text>" or JSONL {"id","label","text"} (chosen by the
// ".jsonl" extension, for both loading and saving). Throws ParseError with the
// offending line.
std::vector<LabeledInstance> load_dataset(const std::filesystem::path& path);
std::vector<LabeledInstance> parse_dataset_tsv(std::string_view text);
std::vector<LabeledInstance> parse_dataset_jsonl(std::string_view text);
void save_dataset(const std::vector<LabeledInstance>& instances, const std::filesystem::path& path);

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Per-class shuffles dealt round-robin across k folds. Throws SplitError when
// a class has fewer than k members.
std::vector<Fold> stratified_kfold(const std::vector<bool>& labels, std::size_t k, std::uint64_t seed);
std::vector<Fold> stratified_kfold(const std::vector<LabeledInstance>& instances, std::size_t k, std::uint64_t seed);

// Positive-class metrics in percent.
struct Metrics {
  Confusion counts;
  double precision = 0;
  double recall = 0;
  double f = 0;

  static Metrics from(const Confusion& c);
};

struct InstancePrediction {
  std::size_t index;  // into the dataset
  std::size_t fold;
  double score;
  bool predicted;
  bool actual;
};

struct FoldDiagnostics {
  std::size_t registry_size_after_train = 0;
  std::size_t registry_size_after_test = 0;
  std::size_t unseen_test_features = 0;  // distinct names dropped at test time
};

struct MetricsReport {
  ExperimentConfig config;
  std::vector<Metrics> folds;
  Metrics pooled;
  std::vector<InstancePrediction> predictions;
  std::vector<FoldDiagnostics> diagnostics;
};

struct HarnessOptions {
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  TrainConfig train;
  unsigned jobs = 1;  // concurrent matrix cells
};

// Tokenized dataset shared across configurations.
struct PreparedCorpus {
  std::vector<TokenizedSentence> sentences;
  std::vector<bool> labels;

  static PreparedCorpus from(const std::vector<LabeledInstance>& instances);
};

// Extracts features for `config` on every sentence (fold independent).
std::vector<FeatureMap> extract_all(const PreparedCorpus& corpus, const ExperimentConfig& config,
                                    const Resources& resources);

// Cross-validates one configuration. Per fold the registry is fitted on the
// training split and frozen before the test split is encoded.
MetricsReport run_config(const ExperimentConfig& config, const std::vector<LabeledInstance>& instances,
                         const Resources& resources, const HarnessOptions& options = {});
MetricsReport run_config(const ExperimentConfig& config, const PreparedCorpus& corpus, const Resources& resources,
                         const HarnessOptions& options = {});

using CellKey = std::tuple<PriorSet, EmbeddingBlock, std::string>;

struct ResultMatrix {
  std::vector<std::string> embeddings;  // column order
  std::map<CellKey, MetricsReport> cells;
  bool intersected = false;
  std::map<std::string, std::size_t> vocabulary_sizes;
  HarnessOptions options;

  const MetricsReport& at(PriorSet prior, EmbeddingBlock aug, const std::string& embedding) const;
};

// Every prior set x augmentation x embedding. With `intersect`, embeddings are
// first restricted to their shared vocabulary.
ResultMatrix run_matrix(const std::vector<LabeledInstance>& instances, const Resources& resources,
                        bool intersect, const HarnessOptions& options = {},
                        std::vector<std::string> embedding_order = {});

struct GainTable {
  std::vector<std::string> embeddings;
  // (embedding, augmentation) -> mean over prior sets of F(aug) - F(none)
  std::map<std::pair<std::string, EmbeddingBlock>, double> by_augmentation;
  // embedding -> mean of its three augmentation gains
  std::map<std::string, double> by_embedding;
};

// Throws IncompleteMatrixError if any cell is missing.
GainTable compute_gains(const ResultMatrix& matrix);

enum class ReportFormat { tsv, markdown };

std::string emit_report(const ResultMatrix& matrix, const GainTable& gains, ReportFormat format);

// Values read back from a markdown report (as printed, i.e. rounded).
struct ParsedReport {
  std::map<CellKey, std::tuple<double, double, double>> prf;
  std::map<std::pair<std::string, EmbeddingBlock>, double> gains;
  std::map<std::string, double> embedding_gains;
};
ParsedReport parse_markdown_report(std::string_view text);

// Fixed-point text with `digits` decimals, and its value read back.
std::string format_fixed(double value, int digits);
double round_to(double value, int digits);

}  // namespace incongruity
