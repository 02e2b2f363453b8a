#include "incongruity/text_pipeline.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "builtin_data.hpp"
#include "incongruity/errors.hpp"

namespace incongruity {

namespace {

struct CodePoint {
  UChar32 value;
  std::size_t begin;
  std::size_t end;
};

std::vector<CodePoint> decode(std::string_view text) {
  std::vector<CodePoint> out;
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  int32_t length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    int32_t start = i;
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) c = 0xFFFD;
    out.push_back({c, static_cast<std::size_t>(start), static_cast<std::size_t>(i)});
  }
  return out;
}

bool is_punct_cp(UChar32 c) {
  if (u_ispunct(c)) return true;
  switch (u_charType(c)) {
    case U_MATH_SYMBOL:
    case U_CURRENCY_SYMBOL:
    case U_MODIFIER_SYMBOL:
    case U_OTHER_SYMBOL:
      return true;
    default:
      return false;
  }
}

std::vector<std::string> parse_word_list(std::istream& in) {
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r");
    words.push_back(line.substr(b, e - b + 1));
  }
  return words;
}

}  // namespace

std::string fold_case(std::string_view word) {
  bool ascii = true;
  for (char c : word) ascii &= static_cast<unsigned char>(c) < 0x80;
  if (ascii) {
    std::string out(word);
    for (char& c : out) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
  }
  auto u = icu::UnicodeString::fromUTF8(icu::StringPiece(word.data(), static_cast<int32_t>(word.size())));
  u.foldCase();
  std::string out;
  u.toUTF8String(out);
  return out;
}

bool is_punctuation(std::string_view token) {
  if (token.empty()) return false;
  for (const auto& cp : decode(token)) {
    if (!is_punct_cp(cp.value)) return false;
  }
  return true;
}

StopwordList::StopwordList(const std::vector<std::string>& words) {
  for (const auto& w : words) words_.insert(fold_case(w));
}

StopwordList StopwordList::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open stopword file " + path.string());
  return StopwordList(parse_word_list(in));
}

const StopwordList& StopwordList::builtin() {
  static const StopwordList list = [] {
    std::istringstream in{std::string(detail::builtin_stopwords_text())};
    return StopwordList(parse_word_list(in));
  }();
  return list;
}

bool StopwordList::contains(std::string_view word) const { return words_.count(fold_case(word)) > 0; }

CasingPolicy parse_casing_policy(std::string_view name) {
  if (name == "exact") return CasingPolicy::exact;
  if (name == "lowercase" || name == "lower") return CasingPolicy::lowercase;
  if (name == "exact_then_lowercase" || name == "auto") return CasingPolicy::exact_then_lowercase;
  throw ConfigError("unknown casing policy '" + std::string(name) + "'");
}

TokenizedSentence tokenize(std::string_view text) {
  TokenizedSentence sentence;
  sentence.raw = std::string(text);

  auto cps = decode(text);
  std::size_t i = 0;
  auto push = [&](std::size_t begin, std::size_t end) {
    sentence.tokens.emplace_back(text.substr(begin, end - begin));
  };

  while (i < cps.size()) {
    while (i < cps.size() && u_isUWhiteSpace(cps[i].value)) ++i;
    if (i == cps.size()) break;
    std::size_t j = i;
    while (j < cps.size() && !u_isUWhiteSpace(cps[j].value)) ++j;

    // [i, j) is one whitespace-delimited chunk.
    std::size_t lead = i;
    while (lead < j && is_punct_cp(cps[lead].value)) ++lead;
    if (lead == j) {
      push(cps[i].begin, cps[j - 1].end);
    } else {
      std::size_t trail = j;
      while (trail > lead && is_punct_cp(cps[trail - 1].value)) --trail;
      if (lead > i) push(cps[i].begin, cps[lead - 1].end);
      push(cps[lead].begin, cps[trail - 1].end);
      if (trail < j) push(cps[trail].begin, cps[j - 1].end);
    }
    i = j;
  }

  if (sentence.tokens.empty()) throw EmptySentenceError("sentence is empty");
  const std::size_t n = sentence.tokens.size();
  sentence.positions.resize(n);
  for (std::size_t k = 0; k < n; ++k) sentence.positions[k] = k;
  sentence.stopword_flags.assign(n, false);
  sentence.invocab_flags.assign(n, false);
  return sentence;
}

std::optional<std::size_t> resolve(const EmbeddingTable& table, std::string_view token, CasingPolicy casing) {
  switch (casing) {
    case CasingPolicy::exact:
      return table.index_of(nfc(token));
    case CasingPolicy::lowercase:
      return table.index_of(nfc(fold_case(token)));
    case CasingPolicy::exact_then_lowercase: {
      std::string normalized = nfc(token);
      if (auto idx = table.index_of(normalized)) return idx;
      std::string lowered = nfc(fold_case(token));
      if (lowered == normalized) return std::nullopt;
      return table.index_of(lowered);
    }
  }
  return std::nullopt;
}

void annotate(TokenizedSentence& sentence, const StopwordList& stopwords, const EmbeddingTable& table,
              CasingPolicy casing) {
  for (std::size_t k = 0; k < sentence.size(); ++k) {
    sentence.stopword_flags[k] = stopwords.contains(sentence.tokens[k]);
    sentence.invocab_flags[k] = resolve(table, sentence.tokens[k], casing).has_value();
  }
}

ContentWordSet content_words(const TokenizedSentence& sentence, const StopwordList& stopwords,
                             const EmbeddingTable& table, CasingPolicy casing) {
  ContentWordSet out;
  std::unordered_map<std::size_t, std::size_t> slot_of_row;
  for (std::size_t k = 0; k < sentence.size(); ++k) {
    const auto& token = sentence.tokens[k];
    if (is_punctuation(token) || stopwords.contains(token)) continue;
    auto row = resolve(table, token, casing);
    if (!row || table.norm(*row) == 0.0) continue;
    auto [it, inserted] = slot_of_row.emplace(*row, out.entries.size());
    if (inserted) out.entries.push_back({table.vocab()[*row], {}, *row});
    out.entries[it->second].positions.push_back(sentence.positions[k]);
  }
  return out;
}

}  // namespace incongruity
