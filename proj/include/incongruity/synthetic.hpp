#pragma once

#include <cstdint>
#include <vector>

#include "incongruity/embedding_store.hpp"
#include "incongruity/harness.hpp"

namespace incongruity {

// Template-generated quotes over a clustered toy vocabulary. Words of one
// cluster are near-parallel; words of different clusters are near-orthogonal.
// A patterned sarcastic sentence holds two same-cluster content words (one
// high-similarity pair) and one foreign word (low-similarity pairs); every
// other sentence draws its three content words from three distinct clusters.
// All words are drawn uniformly, so word identity carries no class signal.
struct SyntheticSpec {
  std::size_t n = 500;
  double skew = 0.2;           // fraction of sarcastic instances
  std::uint64_t seed = 0;
  double separability = 1.0;   // fraction of sarcastic sentences that follow the pattern
  bool marker = false;         // prefix sarcastic sentences with a give-away phrase
  std::size_t clusters = 16;
  std::size_t words_per_cluster = 8;
  std::size_t dimension = 16;
  double noise = 0.1;
};

struct SyntheticCorpus {
  std::vector<LabeledInstance> instances;
  EmbeddingTable embeddings;
};

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec);

}  // namespace incongruity
