#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "incongruity/embedding_store.hpp"
#include "incongruity/features.hpp"
#include "incongruity/text_pipeline.hpp"

namespace incongruity {

/// Cosine scores and minimum token distances between every pair of distinct
/// content-word types of one sentence. Both matrices are symmetric, row-major
/// n x n; diagonal entries are never read.
class PairwiseScores {
 public:
  /// Builds from explicit matrices (fixtures, tests). Requires n >= 2, square
  /// symmetric inputs and off-diagonal distances >= 1.
  PairwiseScores(std::vector<std::string> words, std::vector<double> scores, std::vector<std::size_t> distances);

  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  double score(std::size_t i, std::size_t j) const { return scores_[i * size() + j]; }
  std::size_t distance(std::size_t i, std::size_t j) const { return distances_[i * size() + j]; }

 private:
  std::vector<std::string> words_;
  std::vector<double> scores_;
  std::vector<std::size_t> distances_;
};

/// The four per-sentence summaries of a pairwise score matrix.
///
/// For each word i, best_i is its highest score against any other word and
/// worst_i its lowest. Then
///   max_sim    = max_i best_i     min_sim    = min_i best_i
///   max_dissim = max_i worst_i    min_dissim = min_i worst_i
struct SimilarityBlock {
  double max_sim = 0;
  double min_sim = 0;
  double max_dissim = 0;
  double min_dissim = 0;

  bool operator==(const SimilarityBlock&) const = default;
};

/// Scores every pair of distinct types in `words`. Distance between two types
/// is the smallest gap between any of their occurrence positions. Throws
/// InsufficientContentError for fewer than two entries.
PairwiseScores pairwise_scores(const ContentWordSet& words, const EmbeddingTable& table);

/// S block: summaries of the raw cosine scores.
SimilarityBlock unweighted_features(const PairwiseScores& scores);

/// WS block: the same summaries over score / distance^exponent.
SimilarityBlock weighted_features(const PairwiseScores& scores, double distance_exponent = 2.0);

enum class EmbeddingBlock { none, S, WS, S_and_WS };

std::string to_string(EmbeddingBlock block);
EmbeddingBlock parse_embedding_block(std::string_view name);

struct EmbeddingFeatureOptions {
  CasingPolicy casing = CasingPolicy::exact_then_lowercase;
  double distance_exponent = 2.0;
};

/// Feature names, in S then WS order.
const std::vector<std::string>& embedding_feature_names(EmbeddingBlock block);

/// Emits the selected block(s) under "emb.s.*" / "emb.ws.*". Sentences with
/// fewer than two usable content words get an all-zero block of full size.
FeatureMap embed_features(const TokenizedSentence& sentence, const EmbeddingTable& table, EmbeddingBlock which,
                          const StopwordList& stopwords = StopwordList::builtin(),
                          const EmbeddingFeatureOptions& options = {});

}  // namespace incongruity
