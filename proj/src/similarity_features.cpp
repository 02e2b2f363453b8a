#include "incongruity/similarity_features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "incongruity/errors.hpp"

namespace incongruity {

namespace {

template <typename Score>
SimilarityBlock summarize(std::size_t n, Score&& score) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  SimilarityBlock block{-inf, inf, -inf, inf};
  for (std::size_t i = 0; i < n; ++i) {
    double best = -inf, worst = inf;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double s = score(i, j);
      best = std::max(best, s);
      worst = std::min(worst, s);
    }
    block.max_sim = std::max(block.max_sim, best);
    block.min_sim = std::min(block.min_sim, best);
    block.max_dissim = std::max(block.max_dissim, worst);
    block.min_dissim = std::min(block.min_dissim, worst);
  }
  return block;
}

void emit(FeatureMap& out, std::string_view prefix, const SimilarityBlock& b) {
  std::string p(prefix);
  out[p + "max_sim"] = b.max_sim;
  out[p + "min_sim"] = b.min_sim;
  out[p + "max_dissim"] = b.max_dissim;
  out[p + "min_dissim"] = b.min_dissim;
}

}  // namespace

PairwiseScores::PairwiseScores(std::vector<std::string> words, std::vector<double> scores,
                               std::vector<std::size_t> distances)
    : words_(std::move(words)), scores_(std::move(scores)), distances_(std::move(distances)) {
  const std::size_t n = words_.size();
  if (n < 2) throw InsufficientContentError("need at least two content words, got " + std::to_string(n));
  if (scores_.size() != n * n || distances_.size() != n * n) {
    throw std::invalid_argument("PairwiseScores: matrices must be n x n");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(score(i, j) - score(j, i)) > 1e-9) throw std::invalid_argument("PairwiseScores: scores not symmetric");
      if (distance(i, j) != distance(j, i)) throw std::invalid_argument("PairwiseScores: distances not symmetric");
      if (distance(i, j) < 1) throw std::invalid_argument("PairwiseScores: distance below 1");
      if (!std::isfinite(score(i, j))) throw std::invalid_argument("PairwiseScores: non-finite score");
    }
  }
}

PairwiseScores pairwise_scores(const ContentWordSet& words, const EmbeddingTable& table) {
  const std::size_t n = words.size();
  if (n < 2) throw InsufficientContentError("need at least two content words, got " + std::to_string(n));

  std::vector<std::string> names;
  names.reserve(n);
  for (const auto& e : words.entries) names.push_back(e.word);

  std::vector<double> scores(n * n, 0.0);
  std::vector<std::size_t> distances(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& a = words.entries[i];
      const auto& b = words.entries[j];
      double s = table.similarity(a.vector_index, b.vector_index);
      std::size_t d = std::numeric_limits<std::size_t>::max();
      for (std::size_t pa : a.positions) {
        for (std::size_t pb : b.positions) d = std::min(d, pa > pb ? pa - pb : pb - pa);
      }
      scores[i * n + j] = scores[j * n + i] = s;
      distances[i * n + j] = distances[j * n + i] = d;
    }
  }
  return PairwiseScores(std::move(names), std::move(scores), std::move(distances));
}

SimilarityBlock unweighted_features(const PairwiseScores& scores) {
  return summarize(scores.size(), [&](std::size_t i, std::size_t j) { return scores.score(i, j); });
}

SimilarityBlock weighted_features(const PairwiseScores& scores, double distance_exponent) {
  return summarize(scores.size(), [&](std::size_t i, std::size_t j) {
    const double d = static_cast<double>(scores.distance(i, j));
    const double scale = distance_exponent == 2.0 ? d * d : std::pow(d, distance_exponent);
    return scores.score(i, j) / scale;
  });
}

std::string to_string(EmbeddingBlock block) {
  switch (block) {
    case EmbeddingBlock::none: return "none";
    case EmbeddingBlock::S: return "S";
    case EmbeddingBlock::WS: return "WS";
    case EmbeddingBlock::S_and_WS: return "S+WS";
  }
  return "none";
}

EmbeddingBlock parse_embedding_block(std::string_view name) {
  if (name == "none" || name.empty()) return EmbeddingBlock::none;
  if (name == "S" || name == "s") return EmbeddingBlock::S;
  if (name == "WS" || name == "ws") return EmbeddingBlock::WS;
  if (name == "S+WS" || name == "S_and_WS" || name == "s+ws" || name == "both") return EmbeddingBlock::S_and_WS;
  throw ConfigError("unknown augmentation '" + std::string(name) + "'");
}

const std::vector<std::string>& embedding_feature_names(EmbeddingBlock block) {
  static const std::vector<std::string> none;
  static const std::vector<std::string> s = {"emb.s.max_sim", "emb.s.min_sim", "emb.s.max_dissim",
                                             "emb.s.min_dissim"};
  static const std::vector<std::string> ws = {"emb.ws.max_sim", "emb.ws.min_sim", "emb.ws.max_dissim",
                                              "emb.ws.min_dissim"};
  static const std::vector<std::string> both = [] {
    auto v = s;
    v.insert(v.end(), ws.begin(), ws.end());
    return v;
  }();
  switch (block) {
    case EmbeddingBlock::none: return none;
    case EmbeddingBlock::S: return s;
    case EmbeddingBlock::WS: return ws;
    case EmbeddingBlock::S_and_WS: return both;
  }
  return none;
}

FeatureMap embed_features(const TokenizedSentence& sentence, const EmbeddingTable& table, EmbeddingBlock which,
                          const StopwordList& stopwords, const EmbeddingFeatureOptions& options) {
  FeatureMap out;
  if (which == EmbeddingBlock::none) return out;
  const bool want_s = which == EmbeddingBlock::S || which == EmbeddingBlock::S_and_WS;
  const bool want_ws = which == EmbeddingBlock::WS || which == EmbeddingBlock::S_and_WS;

  SimilarityBlock s, ws;
  auto words = content_words(sentence, stopwords, table, options.casing);
  if (words.size() >= 2) {
    auto scores = pairwise_scores(words, table);
    if (want_s) s = unweighted_features(scores);
    if (want_ws) ws = weighted_features(scores, options.distance_exponent);
  }
  if (want_s) emit(out, "emb.s.", s);
  if (want_ws) emit(out, "emb.ws.", ws);
  return out;
}

}  // namespace incongruity
