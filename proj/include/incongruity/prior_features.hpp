#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "incongruity/embedding_store.hpp"
#include "incongruity/features.hpp"
#include "incongruity/similarity_features.hpp"
#include "incongruity/text_pipeline.hpp"

namespace incongruity {

enum class LexiconTag : std::uint8_t {
  positive = 1 << 0,
  negative = 1 << 1,
  emotion = 1 << 2,
  psych_process = 1 << 3,
  interjection = 1 << 4,
  laughter = 1 << 5,
  implicit_incongruity_phrase = 1 << 6,
};

using TagSet = std::uint8_t;

inline bool has_tag(TagSet tags, LexiconTag tag) { return (tags & static_cast<TagSet>(tag)) != 0; }
std::string to_string(LexiconTag tag);
LexiconTag parse_lexicon_tag(std::string_view name);

// Word and phrase lexicon. Keys are case-folded; multi-word entries are
// matched as token sequences.
class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(std::string name) : name_(std::move(name)) {}

  // "<word-or-phrase>\t<tag>[,<tag>...]" per line, '#' comments.
  static Lexicon load(const std::filesystem::path& path);
  static Lexicon parse(std::string_view text, std::string name);
  // The open substitute lexicon shipped in data/lexicon.tsv.
  static const Lexicon& builtin();

  // Throws FormatError on an empty tag set or a duplicate entry.
  void add(std::string_view entry, TagSet tags);
  // Entries of `other` are added; an entry present in both gets the union of tags.
  void merge(const Lexicon& other);

  TagSet tags(std::string_view word) const;
  // +1 positive, -1 negative, 0 otherwise (including words tagged both).
  int polarity(std::string_view word) const;
  bool has_any(LexiconTag tag) const;

  const std::string& name() const { return name_; }
  std::size_t size() const { return words_.size() + phrases_.size(); }
  const std::vector<std::pair<std::vector<std::string>, TagSet>>& phrases() const { return phrases_; }

 private:
  std::string name_;
  std::unordered_map<std::string, TagSet> words_;
  std::vector<std::pair<std::vector<std::string>, TagSet>> phrases_;
  TagSet present_ = 0;
};

// Case-folded word tokens with punctuation removed.
std::vector<std::string> word_tokens(const TokenizedSentence& sentence);

// Binary presence of every 1..n_max-gram ("uni:", "bi:", "tri:").
FeatureMap ngram_features(const TokenizedSentence& sentence, int n_max);

// Per-category token counts ("liwc.emotion", "liwc.psych_process").
FeatureMap lexicon_category_features(const TokenizedSentence& sentence, const Lexicon& lexicon);

// Pragmatic cues ("prag.*") plus unigrams.
FeatureMap pragmatic_features(const TokenizedSentence& sentence, const Lexicon& lexicon);

struct PolarityStats {
  int flips = 0;
  int longest_positive = 0;
  int longest_negative = 0;
  int lexical_polarity = 0;
};

// Explicit-incongruity statistics of a +1/-1 polarity sequence.
PolarityStats polarity_stats(const std::vector<int>& sequence);

// Number of token-aligned occurrences of implicit-incongruity phrases.
int implicit_phrase_matches(const TokenizedSentence& sentence, const Lexicon& lexicon);

// Explicit and implicit incongruity counts ("inc.*") plus unigrams.
FeatureMap incongruity_features(const TokenizedSentence& sentence, const Lexicon& lexicon);

// The four prior feature sets.
enum class PriorSet { L, G, B, J };

std::string to_string(PriorSet set);
PriorSet parse_prior_set(std::string_view name);
inline constexpr PriorSet kAllPriorSets[] = {PriorSet::L, PriorSet::G, PriorSet::B, PriorSet::J};
inline constexpr EmbeddingBlock kAllAugmentations[] = {EmbeddingBlock::none, EmbeddingBlock::S, EmbeddingBlock::WS,
                                                       EmbeddingBlock::S_and_WS};
// The augmentations that actually add an embedding block.
inline constexpr EmbeddingBlock kEmbeddingAugmentations[] = {EmbeddingBlock::S, EmbeddingBlock::WS,
                                                             EmbeddingBlock::S_and_WS};

struct ExperimentConfig {
  PriorSet prior_set = PriorSet::L;
  EmbeddingBlock augmentation = EmbeddingBlock::none;
  std::string embedding;  // may be empty only when augmentation is none
  bool intersected = false;

  std::string key() const;
  bool operator==(const ExperimentConfig&) const = default;
};

// "L", "L+S", "J+S+WS:word2vec", "G+WS:glove" ...
ExperimentConfig parse_experiment_config(std::string_view text);

struct Resources {
  std::map<std::string, EmbeddingTable, std::less<>> embeddings;
  Lexicon lexicon = Lexicon::builtin();
  StopwordList stopwords = StopwordList::builtin();
  EmbeddingFeatureOptions embedding_options;

  // Throws ConfigError when the config references something missing.
  void validate(const ExperimentConfig& config) const;
  const EmbeddingTable& embedding(std::string_view id) const;
};

// Prior set fragments plus the selected embedding block.
FeatureMap build_config_features(const TokenizedSentence& sentence, const ExperimentConfig& config,
                                 const Resources& resources);

}  // namespace incongruity
