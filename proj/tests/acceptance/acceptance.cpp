// Acceptance suite: one PASS/FAIL/SKIP line per criterion, exit status 1 if
// anything failed. Real-embedding checks run only when the files are present:
//   INCONGRUITY_W2V_PATH   Google News word2vec binary
//   INCONGRUITY_EMBED_DIR  directory holding the four full embedding files

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "incongruity/classifier.hpp"
#include "incongruity/embedding_store.hpp"
#include "incongruity/harness.hpp"
#include "incongruity/similarity_features.hpp"
#include "incongruity/synthetic.hpp"
#include "oracle/brute_force.hpp"
#include "test_util.hpp"

using namespace incongruity;
namespace fs = std::filesystem;

namespace {

enum class Outcome { pass, fail, skip };

struct Result {
  Outcome outcome;
  std::string detail;
};

int failures = 0;

void check(const std::string& name, double budget_seconds, const std::function<Result()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Result r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r = {Outcome::fail, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (r.outcome == Outcome::pass && secs > budget_seconds) {
    r = {Outcome::fail, r.detail + "; over time budget"};
  }
  const char* tag = r.outcome == Outcome::pass ? "PASS" : r.outcome == Outcome::fail ? "FAIL" : "SKIP";
  if (r.outcome == Outcome::fail) ++failures;
  std::printf("%s  %-28s %7.3fs (budget %.0fs)  %s\n", tag, name.c_str(), secs, budget_seconds, r.detail.c_str());
  std::fflush(stdout);
}

Result verdict(bool ok, std::string detail) { return {ok ? Outcome::pass : Outcome::fail, std::move(detail)}; }

std::string fmt(const char* pattern, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
  return buf;
}

Result feature_exactness() {
  auto s = unweighted_features(testutil::worked_example_fixture());
  const bool ok = std::abs(s.max_sim - 0.766) <= 1e-9 && std::abs(s.min_sim - 0.078) <= 1e-9 &&
                  std::abs(s.max_dissim - 0.078) <= 1e-9 && std::abs(s.min_dissim - 0.022) <= 1e-9;
  return verdict(ok, fmt("(%.3f, %.3f, %.3f, %.3f)", s.max_sim, s.min_sim, s.max_dissim, s.min_dissim));
}

Result oracle_equivalence() {
  auto table = testutil::random_table(50, 20, 2024);
  std::vector<std::vector<double>> vectors;
  for (std::size_t i = 0; i < table.size(); ++i) {
    auto v = table.vector(i);
    vectors.emplace_back(v.begin(), v.end());
  }
  const std::set<std::string> stop = {"the", "a", "of", "and"};
  StopwordList stoplist({"the", "a", "of", "and"});
  const char* fillers[] = {"the", "a", "of", "and", "unknown", ",", "!"};
  std::mt19937_64 rng(99);
  double worst = 0;
  std::size_t compared = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::string> tokens;
    std::string text;
    const std::size_t len = 2 + rng() % 20;
    for (std::size_t k = 0; k < len; ++k) {
      tokens.push_back(rng() % 4 == 0 ? fillers[rng() % 7] : "w" + std::to_string(rng() % 50));
      text += tokens.back() + " ";
    }
    auto want = oracle::sentence_features(tokens, table.vocab(), vectors, stop);
    auto got = embed_features(tokenize(text), table, EmbeddingBlock::S_and_WS, stoplist);
    if (want.degenerate) {
      for (const auto& [name, value] : got) worst = std::max(worst, std::abs(value));
      continue;
    }
    ++compared;
    const std::pair<const char*, double> pairs[] = {
        {"emb.s.max_sim", want.s.max_sim},       {"emb.s.min_sim", want.s.min_sim},
        {"emb.s.max_dissim", want.s.max_dissim}, {"emb.s.min_dissim", want.s.min_dissim},
        {"emb.ws.max_sim", want.ws.max_sim},     {"emb.ws.min_sim", want.ws.min_sim},
        {"emb.ws.max_dissim", want.ws.max_dissim}, {"emb.ws.min_dissim", want.ws.min_dissim},
    };
    for (const auto& [name, value] : pairs) worst = std::max(worst, std::abs(got.at(name) - value));
  }
  return verdict(worst <= 1e-9 && compared > 900, fmt("%.0f sentences compared, max |diff| = %.2e", compared, worst));
}

Result google_news_pairs() {
  const char* path = std::getenv("INCONGRUITY_W2V_PATH");
  if (!path || !fs::exists(path)) return {Outcome::skip, "INCONGRUITY_W2V_PATH not set"};
  auto table = load_embeddings(path, EmbeddingFormat::binary_w2v);
  const double mw = cosine_similarity(table.lookup("man"), table.lookup("woman"));
  const double fb = cosine_similarity(table.lookup("fish"), table.lookup("bicycle"));
  return verdict(std::abs(mw - 0.766) <= 0.005 && std::abs(fb - 0.131) <= 0.005,
                 fmt("man/woman %.4f, fish/bicycle %.4f", mw, fb));
}

Result four_way_intersection() {
  const char* dir = std::getenv("INCONGRUITY_EMBED_DIR");
  if (!dir || !fs::is_directory(dir)) return {Outcome::skip, "INCONGRUITY_EMBED_DIR not set"};
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto ext = entry.path().extension();
    if (ext == ".bin" || ext == ".txt" || ext == ".vec") files.push_back(entry.path());
  }
  if (files.size() != 4) return {Outcome::skip, "expected exactly four embedding files in " + std::string(dir)};
  std::vector<EmbeddingTable> tables;
  for (const auto& f : files) tables.push_back(load_embeddings(f));
  auto out = intersect_vocabularies(tables);
  return verdict(out.front().size() == 60252, fmt("intersection has %.0f words", out.front().size()));
}

Result classifier_check() {
  SyntheticSpec spec;
  spec.n = 500;
  spec.skew = 0.1;
  spec.seed = 0;
  auto corpus = generate_synthetic(spec);
  Resources resources;
  resources.embeddings.emplace("synthetic", corpus.embeddings);
  auto prepared = PreparedCorpus::from(corpus.instances);
  auto maps = extract_all(prepared, parse_experiment_config("L+S:synthetic"), resources);
  FeatureRegistry registry;
  std::vector<LabeledVector> data;
  for (std::size_t i = 0; i < maps.size(); ++i) data.push_back({registry.encode(maps[i]), prepared.labels[i]});

  TrainConfig cfg;
  auto first = train(data, cfg, registry.size());
  auto second = train(data, cfg, registry.size());
  const bool deterministic = serialize_model(first) == serialize_model(second);

  std::vector<double> scores;
  auto labels = std::make_unique<bool[]>(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    scores.push_back(first.score(data[i].features));
    labels[i] = data[i].positive;
  }
  const std::span<const bool> label_span(labels.get(), data.size());
  const double tuned = confusion(scores, label_span, first.threshold).f1();
  const double zero = confusion(scores, label_span, 0.0).f1();
  return verdict(deterministic && tuned >= zero,
                 fmt("F tuned %.4f >= F zero %.4f; identical models: ", tuned, zero) +
                     (deterministic ? "yes" : "no"));
}

Result direction_check() {
  SyntheticSpec spec;
  spec.n = 500;
  spec.skew = 0.2;
  spec.seed = 0;
  auto corpus = generate_synthetic(spec);
  Resources resources;
  resources.embeddings.emplace("synthetic", corpus.embeddings);
  HarnessOptions options;
  options.folds = 5;
  auto prepared = PreparedCorpus::from(corpus.instances);
  const double base = run_config(parse_experiment_config("L"), prepared, resources, options).pooled.f;
  const double with_s = run_config(parse_experiment_config("L+S:synthetic"), prepared, resources, options).pooled.f;
  return verdict(with_s >= base + 5.0, fmt("(L,S) F %.2f vs (L,none) F %.2f", with_s, base));
}

Result harness_invariants() {
  SyntheticSpec spec;
  spec.n = 150;
  spec.skew = 0.3;
  spec.seed = 5;
  auto corpus = generate_synthetic(spec);

  auto folds = stratified_kfold(corpus.instances, 5, 0);
  std::vector<int> seen(corpus.instances.size(), 0);
  bool disjoint = true;
  for (const auto& f : folds) {
    std::set<std::size_t> test(f.test.begin(), f.test.end());
    for (auto i : f.train) disjoint = disjoint && !test.count(i);
    disjoint = disjoint && f.train.size() + f.test.size() == corpus.instances.size();
    for (auto i : f.test) ++seen[i];
  }
  bool partition = disjoint;
  for (int s : seen) partition = partition && s == 1;

  Resources resources;
  resources.embeddings.emplace("synthetic", corpus.embeddings);
  HarnessOptions options;
  options.train.epochs = 5;
  auto report = run_config(parse_experiment_config("J+S+WS:synthetic"), corpus.instances, resources, options);
  bool no_leak = true;
  std::size_t dropped = 0;
  for (const auto& d : report.diagnostics) {
    no_leak = no_leak && d.registry_size_after_test == d.registry_size_after_train;
    dropped += d.unseen_test_features;
  }

  SyntheticSpec small = spec;
  small.n = 60;
  auto tiny = generate_synthetic(small);
  Resources two;
  two.embeddings.emplace("a", tiny.embeddings);
  two.embeddings.emplace("b", tiny.embeddings.renamed("b"));
  options.folds = 3;
  options.jobs = 4;
  auto m1 = run_matrix(tiny.instances, two, false, options);
  options.jobs = 1;
  auto m2 = run_matrix(tiny.instances, two, false, options);
  const bool identical = emit_report(m1, compute_gains(m1), ReportFormat::markdown) ==
                             emit_report(m2, compute_gains(m2), ReportFormat::markdown) &&
                         emit_report(m1, compute_gains(m1), ReportFormat::tsv) ==
                             emit_report(m2, compute_gains(m2), ReportFormat::tsv);
  return verdict(partition && no_leak && identical,
                 std::string("partition ") + (partition ? "ok" : "BROKEN") + ", registry frozen " +
                     (no_leak ? "ok" : "LEAKED") + fmt(" (%.0f unseen names dropped)", dropped) + ", reports " +
                     (identical ? "identical" : "DIFFER"));
}

Result gain_arithmetic() {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> hundredths(0, 10000);
  const std::vector<std::string> embeddings = {"lsa", "glove", "dependency", "word2vec"};
  std::size_t checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    ResultMatrix m;
    m.embeddings = embeddings;
    for (const auto& e : embeddings) {
      m.vocabulary_sizes[e] = 1000;
      for (PriorSet p : kAllPriorSets) {
        for (EmbeddingBlock aug : kAllAugmentations) {
          MetricsReport r;
          r.config = {p, aug, e};
          r.pooled.f = hundredths(rng) / 100.0;
          m.cells[{p, aug, e}] = r;
        }
      }
    }
    auto gains = compute_gains(m);
    for (const auto& e : embeddings) {
      double sum = 0;
      for (EmbeddingBlock aug : kEmbeddingAugmentations) sum += gains.by_augmentation.at({e, aug});
      if (gains.by_embedding.at(e) != sum / 3.0) {
        return verdict(false, "embedding " + e + fmt(": %.17g != %.17g", gains.by_embedding.at(e), sum / 3.0));
      }
      ++checked;
    }
  }
  return verdict(true, fmt("%.0f embedding rows equal the mean of their three augmentation gains", checked));
}

}  // namespace

int main() {
  check("feature-extraction exactness", 1, feature_exactness);
  check("oracle equivalence", 10, oracle_equivalence);
  check("google news similarities", 600, google_news_pairs);
  check("four-way intersection", 1800, four_way_intersection);
  check("classifier", 30, classifier_check);
  check("pipeline direction", 120, direction_check);
  check("harness invariants", 120, harness_invariants);
  check("gain arithmetic", 5, gain_arithmetic);
  std::printf("%d failed\n", failures);
  return failures == 0 ? 0 : 1;
}
