#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "incongruity/embedding_store.hpp"

namespace incongruity {

struct TokenizedSentence {
  std::string raw;
  std::vector<std::string> tokens;
  std::vector<std::size_t> positions;
  std::vector<bool> stopword_flags;
  std::vector<bool> invocab_flags;

  std::size_t size() const { return tokens.size(); }
};

// Case-folded stopword set.
class StopwordList {
 public:
  StopwordList() = default;
  explicit StopwordList(const std::vector<std::string>& words);

  // One word per line; '#' starts a comment.
  static StopwordList load(const std::filesystem::path& path);
  // The list shipped in data/stopwords.txt, compiled in.
  static const StopwordList& builtin();

  bool contains(std::string_view word) const;
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

// How a token is matched against an embedding vocabulary.
enum class CasingPolicy { exact, lowercase, exact_then_lowercase };

CasingPolicy parse_casing_policy(std::string_view name);

struct ContentWord {
  std::string word;                     // vocabulary entry that matched
  std::vector<std::size_t> positions;   // token positions of every occurrence
  std::size_t vector_index;             // row in the embedding table
};

struct ContentWordSet {
  std::vector<ContentWord> entries;  // first-occurrence order

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
};

// Full Unicode case folding.
std::string fold_case(std::string_view word);

// True when every code point of the token is punctuation or a symbol.
bool is_punctuation(std::string_view token);

// Splits on Unicode whitespace and detaches leading/trailing punctuation runs
// as their own tokens. Throws EmptySentenceError on blank input.
TokenizedSentence tokenize(std::string_view text);

// Fills stopword_flags and invocab_flags for a sentence.
void annotate(TokenizedSentence& sentence, const StopwordList& stopwords, const EmbeddingTable& table,
              CasingPolicy casing = CasingPolicy::exact_then_lowercase);

// Resolves a token to a vocabulary row under the casing policy.
std::optional<std::size_t> resolve(const EmbeddingTable& table, std::string_view token, CasingPolicy casing);

// Distinct in-vocabulary, non-stopword, non-punctuation word types with all of
// their occurrence positions. Zero-norm vectors are treated as absent.
ContentWordSet content_words(const TokenizedSentence& sentence, const StopwordList& stopwords,
                             const EmbeddingTable& table,
                             CasingPolicy casing = CasingPolicy::exact_then_lowercase);

}  // namespace incongruity
