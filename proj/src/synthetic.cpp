#include "incongruity/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace incongruity {

namespace {

constexpr const char* kTemplates[] = {
    "The {0} of a {1} is the {2} .",
    "A {0} needs a {1} like a {2} needs nothing .",
    "With a {0} like that , you could {1} as a {2} anywhere .",
    "Every {0} has its {1} , but not every {2} .",
    "I would rather {0} than {1} with the {2} .",
    "Some {0} , some {1} , and then the {2} .",
};

constexpr const char* kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z"};
constexpr const char* kVowels[] = {"a", "e", "i", "o", "u"};

// Distinct pronounceable pseudo-word for each index.
std::string pseudo_word(std::size_t index) {
  constexpr std::size_t syllables = std::size(kOnsets) * std::size(kVowels);
  std::string w;
  std::size_t x = index;
  for (int k = 0; k < 3; ++k) {
    const std::size_t s = x % syllables;
    x /= syllables;
    w += kOnsets[s / std::size(kVowels)];
    w += kVowels[s % std::size(kVowels)];
  }
  return w + "x";
}

std::string fill(const std::string& tmpl, const std::vector<std::string>& words) {
  std::string out;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl[i] == '{' && i + 2 < tmpl.size() && tmpl[i + 2] == '}') {
      out += words[static_cast<std::size_t>(tmpl[i + 1] - '0')];
      i += 2;
    } else {
      out += tmpl[i];
    }
  }
  return out;
}

}  // namespace

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n < 2) throw std::invalid_argument("synthetic corpus needs n >= 2");
  if (!(spec.skew > 0 && spec.skew < 1)) throw std::invalid_argument("skew must lie in (0, 1)");
  if (spec.clusters < 3 || spec.words_per_cluster < 2) throw std::invalid_argument("need >= 3 clusters of >= 2 words");
  if (spec.dimension < spec.clusters) throw std::invalid_argument("dimension must be >= number of clusters");

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, spec.noise);
  auto uniform = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  auto coin = [&](double p) { return std::generate_canonical<double, 53>(rng) < p; };

  // Cluster c is centred on basis vector e_c.
  std::vector<std::string> words;
  std::vector<float> data;
  for (std::size_t c = 0; c < spec.clusters; ++c) {
    for (std::size_t k = 0; k < spec.words_per_cluster; ++k) {
      words.push_back(pseudo_word(c * spec.words_per_cluster + k));
      for (std::size_t d = 0; d < spec.dimension; ++d) {
        data.push_back(static_cast<float>((d == c ? 1.0 : 0.0) + gauss(rng)));
      }
    }
  }
  auto word = [&](std::size_t cluster, std::size_t k) { return words[cluster * spec.words_per_cluster + k]; };

  SyntheticCorpus corpus;
  const auto positives = static_cast<std::size_t>(std::llround(spec.skew * static_cast<double>(spec.n)));
  std::vector<bool> labels(spec.n, false);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(positives, 1, spec.n - 1)), true);
  for (std::size_t i = spec.n - 1; i > 0; --i) std::swap(labels[i], labels[uniform(i + 1)]);

  for (std::size_t i = 0; i < spec.n; ++i) {
    std::vector<std::string> slots;
    const bool sarcastic = labels[i];
    if (sarcastic && coin(spec.separability)) {
      const std::size_t a = uniform(spec.clusters);
      std::size_t b = uniform(spec.clusters - 1);
      if (b >= a) ++b;
      const std::size_t k1 = uniform(spec.words_per_cluster);
      std::size_t k2 = uniform(spec.words_per_cluster - 1);
      if (k2 >= k1) ++k2;
      slots = {word(a, k1), word(a, k2), word(b, uniform(spec.words_per_cluster))};
    } else {
      std::vector<std::size_t> picked;
      while (picked.size() < 3) {
        std::size_t c = uniform(spec.clusters);
        if (std::find(picked.begin(), picked.end(), c) == picked.end()) picked.push_back(c);
      }
      for (std::size_t c : picked) slots.push_back(word(c, uniform(spec.words_per_cluster)));
    }
    for (std::size_t s = slots.size() - 1; s > 0; --s) std::swap(slots[s], slots[uniform(s + 1)]);

    std::string text = fill(kTemplates[uniform(std::size(kTemplates))], slots);
    if (sarcastic && spec.marker) text = "Oh yeah , right . " + text;
    corpus.instances.push_back({"q" + std::to_string(i + 1), std::move(text), sarcastic});
  }
  corpus.embeddings = EmbeddingTable("synthetic", spec.dimension, std::move(words), std::move(data));
  return corpus;
}

}  // namespace incongruity
