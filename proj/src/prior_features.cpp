#include "incongruity/prior_features.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "builtin_data.hpp"
#include "incongruity/errors.hpp"

namespace incongruity {

namespace {

constexpr std::pair<LexiconTag, std::string_view> kTagNames[] = {
    {LexiconTag::positive, "positive"},
    {LexiconTag::negative, "negative"},
    {LexiconTag::emotion, "emotion"},
    {LexiconTag::psych_process, "psych_process"},
    {LexiconTag::interjection, "interjection"},
    {LexiconTag::laughter, "laughter"},
    {LexiconTag::implicit_incongruity_phrase, "implicit_incongruity_phrase"},
};

std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string w;
  while (in >> w) out.push_back(fold_case(w));
  return out;
}

bool contains_ellipsis(std::string_view token) {
  return token.find("...") != std::string_view::npos || token.find("…") != std::string_view::npos;
}

bool starts_exclaim_or_question(std::string_view token) {
  return !token.empty() && (token.front() == '!' || token.front() == '?');
}

bool is_laughter_pattern(std::string_view w) {
  // haha, hahaha, hehe, lol, lool, ...
  if (w.size() >= 4 && w.size() % 2 == 0) {
    bool ha = true, he = true;
    for (std::size_t i = 0; i < w.size(); i += 2) {
      ha &= w[i] == 'h' && w[i + 1] == 'a';
      he &= w[i] == 'h' && w[i + 1] == 'e';
    }
    if (ha || he) return true;
  }
  if (w.size() >= 3 && w.front() == 'l' && w.back() == 'l') {
    return std::all_of(w.begin() + 1, w.end() - 1, [](char c) { return c == 'o'; });
  }
  return false;
}

// Code point classes counted by the punctuation block.
std::string_view punct_class(std::string_view cp) {
  if (cp == "!") return "exclamation";
  if (cp == "?") return "question";
  if (cp == ".") return "period";
  if (cp == ",") return "comma";
  if (cp == ":" || cp == ";") return "colon";
  if (cp == "\"" || cp == "'" || cp == "“" || cp == "”" || cp == "‘" || cp == "’") return "quote";
  if (cp == "-" || cp == "–" || cp == "—") return "dash";
  if (cp == "…") return "ellipsis_char";
  return "other";
}

std::vector<std::string_view> utf8_chars(std::string_view s) {
  std::vector<std::string_view> out;
  for (std::size_t i = 0; i < s.size();) {
    auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 1;
    len = std::min(len, s.size() - i);
    out.push_back(s.substr(i, len));
    i += len;
  }
  return out;
}

bool has_double_quote(std::string_view token) {
  return token.find('"') != std::string_view::npos || token.find("“") != std::string_view::npos ||
         token.find("”") != std::string_view::npos || token.find("«") != std::string_view::npos ||
         token.find("»") != std::string_view::npos;
}

}  // namespace

std::string to_string(LexiconTag tag) {
  for (const auto& [t, name] : kTagNames) {
    if (t == tag) return std::string(name);
  }
  return "unknown";
}

LexiconTag parse_lexicon_tag(std::string_view name) {
  for (const auto& [t, n] : kTagNames) {
    if (n == name) return t;
  }
  throw FormatError("unknown lexicon tag '" + std::string(name) + "'");
}

Lexicon Lexicon::parse(std::string_view text, std::string name) {
  Lexicon lex(std::move(name));
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (trim(line).empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw FormatError("expected '<entry>\\t<tags>'", lineno);
    auto entry = trim(line.substr(0, tab));
    auto tag_field = trim(line.substr(tab + 1));
    if (entry.empty()) throw FormatError("empty lexicon entry", lineno);
    TagSet tags = 0;
    std::size_t start = 0;
    while (start <= tag_field.size()) {
      auto comma = tag_field.find(',', start);
      auto tag = trim(tag_field.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (!tag.empty()) {
        try {
          tags |= static_cast<TagSet>(parse_lexicon_tag(tag));
        } catch (const FormatError& e) {
          throw FormatError(e.what(), lineno);
        }
      }
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    try {
      lex.add(entry, tags);
    } catch (const FormatError& e) {
      throw FormatError(e.what(), lineno);
    }
  }
  return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open lexicon file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.stem().string());
}

const Lexicon& Lexicon::builtin() {
  static const Lexicon lex = parse(detail::builtin_lexicon_text(), "builtin");
  return lex;
}

void Lexicon::add(std::string_view entry, TagSet tags) {
  if (tags == 0) throw FormatError("lexicon entry '" + std::string(entry) + "' has no tags");
  auto words = split_words(entry);
  if (words.empty()) throw FormatError("empty lexicon entry");
  if (words.size() == 1) {
    if (!words_.emplace(words[0], tags).second) {
      throw FormatError("duplicate lexicon entry '" + words[0] + "'");
    }
  } else {
    for (const auto& [p, t] : phrases_) {
      if (p == words) throw FormatError("duplicate lexicon entry '" + std::string(entry) + "'");
    }
    phrases_.emplace_back(std::move(words), tags);
  }
  present_ |= tags;
}

void Lexicon::merge(const Lexicon& other) {
  for (const auto& [w, t] : other.words_) words_[w] |= t;
  for (const auto& [p, t] : other.phrases_) {
    auto it = std::find_if(phrases_.begin(), phrases_.end(), [&](const auto& e) { return e.first == p; });
    if (it == phrases_.end()) {
      phrases_.emplace_back(p, t);
    } else {
      it->second |= t;
    }
  }
  present_ |= other.present_;
}

TagSet Lexicon::tags(std::string_view word) const {
  auto it = words_.find(fold_case(word));
  return it == words_.end() ? 0 : it->second;
}

int Lexicon::polarity(std::string_view word) const {
  TagSet t = tags(word);
  bool pos = has_tag(t, LexiconTag::positive), neg = has_tag(t, LexiconTag::negative);
  if (pos == neg) return 0;
  return pos ? 1 : -1;
}

bool Lexicon::has_any(LexiconTag tag) const { return has_tag(present_, tag); }

std::vector<std::string> word_tokens(const TokenizedSentence& sentence) {
  std::vector<std::string> out;
  out.reserve(sentence.size());
  for (const auto& t : sentence.tokens) {
    if (!is_punctuation(t)) out.push_back(fold_case(t));
  }
  return out;
}

FeatureMap ngram_features(const TokenizedSentence& sentence, int n_max) {
  static constexpr std::string_view prefixes[] = {"uni:", "bi:", "tri:"};
  n_max = std::clamp(n_max, 1, 3);
  auto words = word_tokens(sentence);
  FeatureMap out;
  for (int n = 1; n <= n_max; ++n) {
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= words.size(); ++i) {
      std::string name(prefixes[n - 1]);
      for (int k = 0; k < n; ++k) {
        if (k) name += '_';
        name += words[i + static_cast<std::size_t>(k)];
      }
      out[name] = 1.0;
    }
  }
  return out;
}

FeatureMap lexicon_category_features(const TokenizedSentence& sentence, const Lexicon& lexicon) {
  FeatureMap out;
  for (const auto& t : sentence.tokens) {
    TagSet tags = lexicon.tags(t);
    if (has_tag(tags, LexiconTag::emotion)) out["liwc.emotion"] += 1;
    if (has_tag(tags, LexiconTag::psych_process)) out["liwc.psych_process"] += 1;
  }
  return out;
}

FeatureMap pragmatic_features(const TokenizedSentence& sentence, const Lexicon& lexicon) {
  FeatureMap out = ngram_features(sentence, 1);
  const auto& tokens = sentence.tokens;

  // Hyperbole: three same-polarity sentiment words in a row, punctuation skipped.
  int run = 0, run_sign = 0;
  for (const auto& t : tokens) {
    if (is_punctuation(t)) continue;
    int p = lexicon.polarity(t);
    if (p != 0 && p == run_sign) {
      ++run;
    } else {
      run = p != 0 ? 1 : 0;
      run_sign = p;
    }
    if (run >= 3) out["prag.hyperbole"] = 1;
  }

  for (std::size_t k = 0; k < tokens.size(); ++k) {
    const auto& t = tokens[k];
    if (has_double_quote(t)) out["prag.quotes"] = 1;
    if (contains_ellipsis(t)) out["prag.ellipsis"] = 1;

    if (is_punctuation(t)) {
      std::string rest = t;
      for (auto at = rest.find("..."); at != std::string::npos; at = rest.find("...")) {
        out["prag.punct.ellipsis"] += 1;
        rest.erase(at, 3);
      }
      for (auto ch : utf8_chars(rest)) out["prag.punct." + std::string(punct_class(ch))] += 1;
      continue;
    }

    TagSet tags = lexicon.tags(t);
    if (has_tag(tags, LexiconTag::interjection)) out["prag.interjections"] += 1;
    if (has_tag(tags, LexiconTag::laughter) || is_laughter_pattern(fold_case(t))) out["prag.laughter"] += 1;

    int p = lexicon.polarity(t);
    if (p != 0 && k + 1 < tokens.size() && is_punctuation(tokens[k + 1])) {
      const char* pol = p > 0 ? "pos" : "neg";
      if (starts_exclaim_or_question(tokens[k + 1])) out[std::string("prag.") + pol + "_then_excl_q"] = 1;
      if (contains_ellipsis(tokens[k + 1])) out[std::string("prag.") + pol + "_then_ellipsis"] = 1;
    }
  }
  return out;
}

PolarityStats polarity_stats(const std::vector<int>& sequence) {
  PolarityStats s;
  int run = 0;
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    int p = sequence[i];
    s.lexical_polarity += p;
    if (i > 0 && p != sequence[i - 1]) {
      ++s.flips;
      run = 0;
    }
    ++run;
    if (p > 0) s.longest_positive = std::max(s.longest_positive, run);
    if (p < 0) s.longest_negative = std::max(s.longest_negative, run);
  }
  return s;
}

int implicit_phrase_matches(const TokenizedSentence& sentence, const Lexicon& lexicon) {
  auto words = word_tokens(sentence);
  int count = 0;
  for (const auto& w : words) {
    if (has_tag(lexicon.tags(w), LexiconTag::implicit_incongruity_phrase)) ++count;
  }
  for (const auto& [phrase, tags] : lexicon.phrases()) {
    if (!has_tag(tags, LexiconTag::implicit_incongruity_phrase) || phrase.size() > words.size()) continue;
    for (std::size_t i = 0; i + phrase.size() <= words.size(); ++i) {
      if (std::equal(phrase.begin(), phrase.end(), words.begin() + static_cast<std::ptrdiff_t>(i))) ++count;
    }
  }
  return count;
}

FeatureMap incongruity_features(const TokenizedSentence& sentence, const Lexicon& lexicon) {
  FeatureMap out = ngram_features(sentence, 1);
  std::vector<int> sequence;
  for (const auto& t : sentence.tokens) {
    if (int p = lexicon.polarity(t); p != 0) sequence.push_back(p);
  }
  auto stats = polarity_stats(sequence);
  auto put = [&](const char* name, int v) {
    if (v != 0) out[name] = v;
  };
  put("inc.flips", stats.flips);
  put("inc.longest_pos", stats.longest_positive);
  put("inc.longest_neg", stats.longest_negative);
  put("inc.polarity", stats.lexical_polarity);
  put("inc.implicit", implicit_phrase_matches(sentence, lexicon));
  return out;
}

std::string to_string(PriorSet set) {
  switch (set) {
    case PriorSet::L: return "L";
    case PriorSet::G: return "G";
    case PriorSet::B: return "B";
    case PriorSet::J: return "J";
  }
  return "L";
}

PriorSet parse_prior_set(std::string_view name) {
  if (name == "L") return PriorSet::L;
  if (name == "G") return PriorSet::G;
  if (name == "B") return PriorSet::B;
  if (name == "J") return PriorSet::J;
  throw ConfigError("unknown prior feature set '" + std::string(name) + "'");
}

std::string ExperimentConfig::key() const {
  std::string k = to_string(prior_set);
  if (augmentation != EmbeddingBlock::none) k += "+" + to_string(augmentation);
  if (!embedding.empty()) k += ":" + embedding;
  if (intersected) k += "@intersected";
  return k;
}

ExperimentConfig parse_experiment_config(std::string_view text) {
  ExperimentConfig cfg;
  auto colon = text.find(':');
  std::string_view head = text.substr(0, colon);
  if (colon != std::string_view::npos) cfg.embedding = std::string(text.substr(colon + 1));
  auto plus = head.find('+');
  cfg.prior_set = parse_prior_set(head.substr(0, plus));
  cfg.augmentation = plus == std::string_view::npos ? EmbeddingBlock::none : parse_embedding_block(head.substr(plus + 1));
  if (cfg.augmentation != EmbeddingBlock::none && cfg.embedding.empty()) {
    throw ConfigError("config '" + std::string(text) + "' needs an embedding (e.g. L+S:word2vec)");
  }
  return cfg;
}

const EmbeddingTable& Resources::embedding(std::string_view id) const {
  auto it = embeddings.find(id);
  if (it == embeddings.end()) throw ConfigError("unknown embedding '" + std::string(id) + "'");
  return it->second;
}

void Resources::validate(const ExperimentConfig& config) const {
  if (!config.embedding.empty()) embedding(config.embedding);
  if (config.augmentation != EmbeddingBlock::none && config.embedding.empty()) {
    throw ConfigError("augmentation " + to_string(config.augmentation) + " requires an embedding");
  }
  switch (config.prior_set) {
    case PriorSet::L:
      break;
    case PriorSet::G:
      if (!lexicon.has_any(LexiconTag::emotion) && !lexicon.has_any(LexiconTag::psych_process)) {
        throw ConfigError("lexicon '" + lexicon.name() + "' has no emotion/psych_process entries (needed by G)");
      }
      break;
    case PriorSet::B:
    case PriorSet::J:
      if (!lexicon.has_any(LexiconTag::positive) && !lexicon.has_any(LexiconTag::negative)) {
        throw ConfigError("lexicon '" + lexicon.name() + "' has no sentiment entries (needed by " +
                          to_string(config.prior_set) + ")");
      }
      break;
  }
}

FeatureMap build_config_features(const TokenizedSentence& sentence, const ExperimentConfig& config,
                                 const Resources& resources) {
  FeatureMap out;
  switch (config.prior_set) {
    case PriorSet::L:
      out = ngram_features(sentence, 3);
      break;
    case PriorSet::G:
      out = ngram_features(sentence, 1);
      merge_into(out, lexicon_category_features(sentence, resources.lexicon));
      break;
    case PriorSet::B:
      out = pragmatic_features(sentence, resources.lexicon);
      break;
    case PriorSet::J:
      out = incongruity_features(sentence, resources.lexicon);
      break;
  }
  if (config.augmentation != EmbeddingBlock::none) {
    merge_into(out, embed_features(sentence, resources.embedding(config.embedding), config.augmentation,
                                   resources.stopwords, resources.embedding_options));
  }
  return out;
}

}  // namespace incongruity
