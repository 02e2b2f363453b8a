#include "incongruity/embedding_store.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include "incongruity/errors.hpp"

namespace incongruity {

namespace {

bool is_ascii(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_float(std::string_view s, float& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_count(std::string_view s, std::size_t& out) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
    return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

EmbeddingTable load_text(const std::filesystem::path& path, std::string name) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open embedding file " + path.string());

  std::vector<std::string> words;
  std::vector<float> data;
  std::size_t dimension = 0;
  std::optional<std::size_t> declared_count;
  std::unordered_set<std::string> seen;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = split_spaces(line);
    if (fields.empty()) continue;

    std::size_t count = 0, dim = 0;
    if (lineno == 1 && fields.size() == 2 && parse_count(fields[0], count) && parse_count(fields[1], dim)) {
      if (dim == 0) throw FormatError("header declares zero dimension", lineno);
      declared_count = count;
      dimension = dim;
      continue;
    }
    if (fields.size() < 2) throw FormatError("row has no vector components", lineno);
    if (dimension == 0) dimension = fields.size() - 1;
    if (fields.size() - 1 != dimension) {
      throw FormatError("row has " + std::to_string(fields.size() - 1) + " components, expected " +
                            std::to_string(dimension),
                        lineno);
    }
    std::string word = nfc(fields[0]);
    if (!seen.insert(word).second) throw FormatError("duplicate word '" + word + "'", lineno);
    for (std::size_t k = 1; k < fields.size(); ++k) {
      float v = 0;
      if (!parse_float(fields[k], v)) {
        throw FormatError("bad number '" + std::string(fields[k]) + "'", lineno);
      }
      data.push_back(v);
    }
    words.push_back(std::move(word));
  }
  if (declared_count && *declared_count != words.size()) {
    throw FormatError("header declares " + std::to_string(*declared_count) + " words, file has " +
                      std::to_string(words.size()));
  }
  if (dimension == 0) throw FormatError("embedding file " + path.string() + " is empty");
  return EmbeddingTable(std::move(name), dimension, std::move(words), std::move(data));
}

EmbeddingTable load_binary(const std::filesystem::path& path, std::string name) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open embedding file " + path.string());

  std::string header;
  if (!std::getline(in, header)) throw FormatError("missing header", 1);
  auto fields = split_spaces(header);
  std::size_t count = 0, dimension = 0;
  if (fields.size() != 2 || !parse_count(fields[0], count) || !parse_count(fields[1], dimension) ||
      dimension == 0) {
    throw FormatError("malformed header '" + header + "'", 1);
  }

  std::vector<std::string> words;
  std::vector<float> data(count * dimension);
  words.reserve(count);
  std::unordered_set<std::string> seen;
  std::vector<char> raw(dimension * sizeof(float));

  for (std::size_t r = 0; r < count; ++r) {
    std::string word;
    int c = in.get();
    while (c == '\n' || c == '\r') c = in.get();
    while (c != EOF && c != ' ') {
      word.push_back(static_cast<char>(c));
      c = in.get();
    }
    if (c == EOF) throw FormatError("truncated record " + std::to_string(r + 1) + " (expected " +
                                    std::to_string(count) + ")");
    if (word.empty()) throw FormatError("empty word in record " + std::to_string(r + 1));
    if (!in.read(raw.data(), static_cast<std::streamsize>(raw.size()))) {
      throw FormatError("truncated vector for word '" + word + "'");
    }
    float* dst = data.data() + r * dimension;
    std::memcpy(dst, raw.data(), raw.size());
    if constexpr (std::endian::native == std::endian::big) {
      for (std::size_t k = 0; k < dimension; ++k) {
        std::uint32_t bits;
        std::memcpy(&bits, dst + k, 4);
        bits = __builtin_bswap32(bits);
        std::memcpy(dst + k, &bits, 4);
      }
    }
    word = nfc(word);
    if (!seen.insert(word).second) throw FormatError("duplicate word '" + word + "'");
    words.push_back(std::move(word));
  }
  return EmbeddingTable(std::move(name), dimension, std::move(words), std::move(data));
}

}  // namespace

std::string nfc(std::string_view text) {
  if (is_ascii(text)) return std::string(text);
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* normalizer = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalizer unavailable");
  icu::UnicodeString source = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::UnicodeString normalized = normalizer->normalize(source, status);
  if (U_FAILURE(status)) return std::string(text);
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

EmbeddingFormat format_from_path(const std::filesystem::path& path) {
  return path.extension() == ".bin" ? EmbeddingFormat::binary_w2v : EmbeddingFormat::text_vectors;
}

std::string to_string(EmbeddingFormat format) {
  return format == EmbeddingFormat::binary_w2v ? "binary_w2v" : "text_vectors";
}

EmbeddingFormat parse_embedding_format(std::string_view name) {
  if (name == "binary_w2v" || name == "binary") return EmbeddingFormat::binary_w2v;
  if (name == "text_vectors" || name == "text") return EmbeddingFormat::text_vectors;
  throw ConfigError("unknown embedding format '" + std::string(name) + "'");
}

EmbeddingTable::EmbeddingTable(std::string name, std::size_t dimension, std::vector<std::string> words,
                               std::vector<float> flat_vectors)
    : name_(std::move(name)), dimension_(dimension), vocab_(std::move(words)), data_(std::move(flat_vectors)) {
  if (dimension_ == 0) throw FormatError("embedding dimension must be positive");
  if (data_.size() != vocab_.size() * dimension_) {
    throw FormatError("vector data does not match vocab size x dimension");
  }
  index_.reserve(vocab_.size());
  norms_.resize(vocab_.size());
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    vocab_[i] = nfc(vocab_[i]);
    if (!index_.emplace(vocab_[i], i).second) throw FormatError("duplicate word '" + vocab_[i] + "'");
    double sq = 0;
    for (float v : vector(i)) sq += static_cast<double>(v) * v;
    norms_[i] = std::sqrt(sq);
  }
}

bool EmbeddingTable::contains(std::string_view word) const { return index_of(word).has_value(); }

std::optional<std::size_t> EmbeddingTable::index_of(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const float> EmbeddingTable::lookup(std::string_view word) const {
  auto idx = index_of(word);
  if (!idx) return {};
  return vector(*idx);
}

double EmbeddingTable::similarity(std::size_t a, std::size_t b) const {
  if (norms_[a] == 0.0 || norms_[b] == 0.0) {
    throw DegenerateVectorError("zero-norm vector for '" + vocab_[norms_[a] == 0.0 ? a : b] + "'");
  }
  auto va = vector(a), vb = vector(b);
  double dot = 0;
  for (std::size_t k = 0; k < dimension_; ++k) dot += static_cast<double>(va[k]) * vb[k];
  return std::clamp(dot / (norms_[a] * norms_[b]), -1.0, 1.0);
}

EmbeddingTable EmbeddingTable::renamed(std::string name) const {
  EmbeddingTable copy = *this;
  copy.name_ = std::move(name);
  return copy;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path, EmbeddingFormat format, std::string name) {
  if (name.empty()) name = path.stem().string();
  return format == EmbeddingFormat::binary_w2v ? load_binary(path, std::move(name))
                                               : load_text(path, std::move(name));
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  return load_embeddings(path, format_from_path(path));
}

void save_text_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  char buf[64];
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.vocab()[i];
    for (float v : table.vector(i)) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
      out << ' ' << std::string_view(buf, static_cast<std::size_t>(end - buf));
    }
    out << '\n';
  }
}

void save_binary_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << table.size() << ' ' << table.dimension() << '\n';
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.vocab()[i] << ' ';
    for (float v : table.vector(i)) {
      std::uint32_t bits;
      std::memcpy(&bits, &v, 4);
      if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
      out.write(reinterpret_cast<const char*>(&bits), 4);
    }
    out << '\n';
  }
}

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine_similarity: dimension mismatch");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    dot += static_cast<double>(a[k]) * b[k];
    na += static_cast<double>(a[k]) * a[k];
    nb += static_cast<double>(b[k]) * b[k];
  }
  if (na == 0.0 || nb == 0.0) throw DegenerateVectorError("cosine_similarity: zero-norm vector");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

std::vector<EmbeddingTable> intersect_vocabularies(const std::vector<EmbeddingTable>& tables) {
  if (tables.empty()) throw std::invalid_argument("intersect_vocabularies: no tables");
  if (tables.size() == 1) return tables;

  auto common = [&](const std::string& w) {
    return std::all_of(tables.begin(), tables.end(), [&](const EmbeddingTable& t) { return t.contains(w); });
  };

  std::vector<EmbeddingTable> out;
  out.reserve(tables.size());
  for (const auto& table : tables) {
    std::vector<std::string> words;
    std::vector<float> data;
    for (std::size_t i = 0; i < table.size(); ++i) {
      const auto& w = table.vocab()[i];
      if (!common(w)) continue;
      words.push_back(w);
      auto v = table.vector(i);
      data.insert(data.end(), v.begin(), v.end());
    }
    if (words.empty()) throw EmptyIntersectionError("embedding vocabularies share no words");
    out.emplace_back(table.name(), table.dimension(), std::move(words), std::move(data));
  }
  return out;
}

}  // namespace incongruity
