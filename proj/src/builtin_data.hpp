#pragma once

#include <string_view>

namespace incongruity::detail {

// Contents of data/stopwords.txt and data/lexicon.tsv, embedded at build time.
std::string_view builtin_stopwords_text();
std::string_view builtin_lexicon_text();

}  // namespace incongruity::detail
