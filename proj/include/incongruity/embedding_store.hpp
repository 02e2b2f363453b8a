#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace incongruity {

enum class EmbeddingFormat { binary_w2v, text_vectors };

// Picks a format from the file extension: ".bin" is binary, anything else text.
EmbeddingFormat format_from_path(const std::filesystem::path& path);

std::string to_string(EmbeddingFormat format);
EmbeddingFormat parse_embedding_format(std::string_view name);

// Word -> dense vector table. Immutable once built; concurrent reads are safe.
// Vectors are kept as loaded (not normalized); norms are cached alongside.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;

  // Builds a table from parallel word/vector lists. Words are NFC-normalized.
  // Throws FormatError on duplicates or a dimension mismatch.
  EmbeddingTable(std::string name, std::size_t dimension, std::vector<std::string> words,
                 std::vector<float> flat_vectors);

  const std::string& name() const { return name_; }
  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return vocab_.size(); }
  bool empty() const { return vocab_.empty(); }
  const std::vector<std::string>& vocab() const { return vocab_; }

  bool contains(std::string_view word) const;
  std::optional<std::size_t> index_of(std::string_view word) const;

  std::span<const float> vector(std::size_t index) const {
    return {data_.data() + index * dimension_, dimension_};
  }
  // Empty span when the word is absent.
  std::span<const float> lookup(std::string_view word) const;
  double norm(std::size_t index) const { return norms_[index]; }

  // Cosine between two rows using the cached norms.
  double similarity(std::size_t a, std::size_t b) const;

  EmbeddingTable renamed(std::string name) const;

 private:
  std::string name_;
  std::size_t dimension_ = 0;
  std::vector<std::string> vocab_;
  std::vector<float> data_;
  std::vector<double> norms_;
  std::unordered_map<std::string, std::size_t> index_;
};

// NFC normalization of a UTF-8 string.
std::string nfc(std::string_view text);

// Loads a table. The table name defaults to the file stem.
EmbeddingTable load_embeddings(const std::filesystem::path& path, EmbeddingFormat format,
                               std::string name = {});
EmbeddingTable load_embeddings(const std::filesystem::path& path);

void save_text_embeddings(const EmbeddingTable& table, const std::filesystem::path& path);
void save_binary_embeddings(const EmbeddingTable& table, const std::filesystem::path& path);

// dot(a,b) / (|a| |b|), clamped to [-1, 1]. Throws DegenerateVectorError on a
// zero-norm input and std::invalid_argument on a dimension mismatch.
double cosine_similarity(std::span<const float> a, std::span<const float> b);

// Restricts every table to the words present in all of them, keeping each
// table's own word order. Throws EmptyIntersectionError if nothing is shared.
std::vector<EmbeddingTable> intersect_vocabularies(const std::vector<EmbeddingTable>& tables);

}  // namespace incongruity
