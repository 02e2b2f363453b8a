#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "incongruity/errors.hpp"
#include "incongruity/harness.hpp"
#include "incongruity/synthetic.hpp"
#include "test_util.hpp"

using namespace incongruity;

namespace {

Resources synthetic_resources(const SyntheticCorpus& corpus) {
  Resources r;
  r.embeddings.emplace("synthetic", corpus.embeddings);
  return r;
}

// Same words, four differently perturbed tables; the last one drops a few words.
Resources four_embeddings(const SyntheticCorpus& corpus) {
  Resources r;
  const auto& base = corpus.embeddings;
  for (int e = 0; e < 4; ++e) {
    std::vector<std::string> words;
    std::vector<float> data;
    std::mt19937 rng(e);
    std::normal_distribution<float> g(0.0f, 0.05f * static_cast<float>(e));
    for (std::size_t i = 0; i < base.size(); ++i) {
      if (e == 3 && i % 17 == 0) continue;
      words.push_back(base.vocab()[i]);
      for (float v : base.vector(i)) data.push_back(v + g(rng));
    }
    const std::string name = "emb" + std::to_string(e);
    r.embeddings.emplace(name, EmbeddingTable(name, base.dimension(), words, data));
  }
  return r;
}

SyntheticCorpus small_corpus(std::size_t n = 80, std::uint64_t seed = 1) {
  SyntheticSpec spec;
  spec.n = n;
  spec.skew = 0.25;
  spec.seed = seed;
  return generate_synthetic(spec);
}

HarnessOptions fast_options() {
  HarnessOptions o;
  o.folds = 3;
  o.train.epochs = 5;
  return o;
}

}  // namespace

TEST(Dataset, TsvParsing) {
  auto d = parse_dataset_tsv("a\t1\tOh great .\nb\t0\tFine\ttabs\n");
  ASSERT_EQ(d.size(), 2u);
  EXPECT_TRUE(d[0].sarcastic);
  EXPECT_EQ(d[1].text, "Fine\ttabs");
}

TEST(Dataset, ErrorsNameTheLine) {
  auto line_of = [](auto fn) -> std::size_t {
    try {
      fn();
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  EXPECT_EQ(line_of([] { parse_dataset_tsv("a\t1\tok\nb\t2\tbad label\n"); }), 2u);
  EXPECT_EQ(line_of([] { parse_dataset_tsv("a\t1\t\n"); }), 1u);
  EXPECT_EQ(line_of([] { parse_dataset_tsv("a\t1\tx\nb\t0\ty\na\t0\tz\n"); }), 3u);
  EXPECT_EQ(line_of([] { parse_dataset_jsonl("{\"id\":\"a\",\"label\":1,\"text\":\"x\"}\n{oops\n"); }), 2u);
}

TEST(Dataset, JsonlAndRoundTrip) {
  auto d = parse_dataset_jsonl(
      "{\"id\":\"a\",\"label\":true,\"text\":\"yes\"}\n{\"id\":\"b\",\"label\":\"0\",\"text\":\"no\"}\n");
  ASSERT_EQ(d.size(), 2u);
  EXPECT_TRUE(d[0].sarcastic);
  EXPECT_FALSE(d[1].sarcastic);
  testutil::TempDir dir;
  save_dataset(d, dir.path() / "d.tsv");
  EXPECT_EQ(load_dataset(dir.path() / "d.tsv"), d);
  save_dataset(d, dir.path() / "d.jsonl");
  EXPECT_EQ(load_dataset(dir.path() / "d.jsonl"), d);
}

TEST(StratifiedKFold, TenPositivesFortyNegatives) {
  std::vector<bool> labels(50, false);
  std::fill(labels.begin(), labels.begin() + 10, true);
  auto folds = stratified_kfold(labels, 5, 0);
  ASSERT_EQ(folds.size(), 5u);
  for (const auto& f : folds) {
    std::size_t pos = 0;
    for (auto i : f.test) pos += labels[i];
    EXPECT_EQ(pos, 2u);
    EXPECT_EQ(f.test.size() - pos, 8u);
  }
}

TEST(StratifiedKFold, PartitionsAndIsDeterministic) {
  std::mt19937 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 20 + rng() % 200;
    const std::size_t k = 2 + rng() % 8;
    std::vector<bool> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = i < k || (i >= n - k) ? i < k : rng() % 4 == 0;
    auto folds = stratified_kfold(labels, k, trial);
    std::vector<int> seen(n, 0);
    for (const auto& f : folds) {
      EXPECT_EQ(f.train.size() + f.test.size(), n);
      std::set<std::size_t> test(f.test.begin(), f.test.end());
      for (auto i : f.train) EXPECT_EQ(test.count(i), 0u);
      for (auto i : f.test) ++seen[i];
    }
    for (int s : seen) EXPECT_EQ(s, 1);
    auto again = stratified_kfold(labels, k, trial);
    for (std::size_t f = 0; f < k; ++f) EXPECT_EQ(again[f].test, folds[f].test);
  }
}

TEST(StratifiedKFold, TooFewOfAClass) {
  std::vector<bool> labels(20, false);
  labels[0] = labels[1] = true;
  EXPECT_THROW(stratified_kfold(labels, 3, 0), SplitError);
  EXPECT_NO_THROW(stratified_kfold(labels, 2, 0));
}

TEST(Metrics, PercentagesAndZeroF) {
  auto m = Metrics::from(Confusion{3, 1, 1, 5});
  EXPECT_DOUBLE_EQ(m.precision, 75.0);
  EXPECT_DOUBLE_EQ(m.recall, 75.0);
  EXPECT_DOUBLE_EQ(m.f, 75.0);
  auto z = Metrics::from(Confusion{0, 0, 4, 6});
  EXPECT_EQ(z.f, 0.0);
  EXPECT_FALSE(std::isnan(z.precision));
}

TEST(RunConfig, MarkerCorpusIsPerfectlySeparable) {
  SyntheticSpec spec;
  spec.n = 100;
  spec.skew = 0.3;
  spec.marker = true;
  auto corpus = generate_synthetic(spec);
  auto report = run_config(parse_experiment_config("L"), corpus.instances, synthetic_resources(corpus), fast_options());
  EXPECT_DOUBLE_EQ(report.pooled.f, 100.0);
}

TEST(RunConfig, UnknownEmbeddingFailsBeforeAnyFold) {
  auto corpus = small_corpus();
  EXPECT_THROW(run_config(parse_experiment_config("L+S:missing"), corpus.instances, Resources{}, fast_options()),
               ConfigError);
}

TEST(RunConfig, PooledMetricsMatchPredictionsAndNoLeakage) {
  auto corpus = small_corpus(90, 4);
  auto report =
      run_config(parse_experiment_config("J+S+WS:synthetic"), corpus.instances, synthetic_resources(corpus), fast_options());
  ASSERT_EQ(report.predictions.size(), corpus.instances.size());
  Confusion c;
  std::set<std::size_t> indices;
  for (const auto& p : report.predictions) {
    indices.insert(p.index);
    EXPECT_EQ(p.actual, corpus.instances[p.index].sarcastic);
    if (p.predicted && p.actual) ++c.tp;
    if (p.predicted && !p.actual) ++c.fp;
    if (!p.predicted && p.actual) ++c.fn;
    if (!p.predicted && !p.actual) ++c.tn;
  }
  EXPECT_EQ(indices.size(), corpus.instances.size());
  EXPECT_DOUBLE_EQ(Metrics::from(c).f, report.pooled.f);
  ASSERT_EQ(report.diagnostics.size(), 3u);
  for (const auto& d : report.diagnostics) EXPECT_EQ(d.registry_size_after_train, d.registry_size_after_test);
  EXPECT_GT(std::accumulate(report.diagnostics.begin(), report.diagnostics.end(), std::size_t{0},
                            [](std::size_t acc, const FoldDiagnostics& d) { return acc + d.unseen_test_features; }),
            0u);
}

TEST(RunConfig, DeterministicAcrossRuns) {
  auto corpus = small_corpus();
  auto r = synthetic_resources(corpus);
  auto a = run_config(parse_experiment_config("B+S:synthetic"), corpus.instances, r, fast_options());
  auto b = run_config(parse_experiment_config("B+S:synthetic"), corpus.instances, r, fast_options());
  ASSERT_EQ(a.predictions.size(), b.predictions.size());
  for (std::size_t i = 0; i < a.predictions.size(); ++i) EXPECT_EQ(a.predictions[i].score, b.predictions[i].score);
}

TEST(RunConfig, GoldenFOnCommittedFixture) {
  auto instances = load_dataset(INCONGRUITY_TEST_DATA "/fixture50.tsv");
  ASSERT_EQ(instances.size(), 50u);
  auto report = run_config(parse_experiment_config("L"), instances, Resources{}, HarnessOptions{});
  EXPECT_NEAR(report.pooled.f, INCONGRUITY_FIXTURE50_F, 1e-9);
}

class MatrixTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    corpus_ = new SyntheticCorpus(small_corpus(60, 2));
    resources_ = new Resources(four_embeddings(*corpus_));
    auto opts = fast_options();
    opts.jobs = 4;
    matrix_ = new ResultMatrix(run_matrix(corpus_->instances, *resources_, false, opts));
  }
  static void TearDownTestSuite() {
    delete matrix_;
    delete resources_;
    delete corpus_;
  }
  static SyntheticCorpus* corpus_;
  static Resources* resources_;
  static ResultMatrix* matrix_;
};
SyntheticCorpus* MatrixTest::corpus_ = nullptr;
Resources* MatrixTest::resources_ = nullptr;
ResultMatrix* MatrixTest::matrix_ = nullptr;

TEST_F(MatrixTest, HasSixtyFourCellsWithSharedBaselines) {
  EXPECT_EQ(matrix_->cells.size(), 64u);
  for (PriorSet p : kAllPriorSets) {
    const double f = matrix_->at(p, EmbeddingBlock::none, "emb0").pooled.f;
    for (const auto& e : matrix_->embeddings) EXPECT_EQ(matrix_->at(p, EmbeddingBlock::none, e).pooled.f, f);
  }
  EXPECT_THROW(matrix_->at(PriorSet::L, EmbeddingBlock::S, "nope"), IncompleteMatrixError);
}

TEST_F(MatrixTest, GainsAreMeansOfDifferences) {
  auto gains = compute_gains(*matrix_);
  for (const auto& e : matrix_->embeddings) {
    double sum = 0;
    for (EmbeddingBlock aug : kEmbeddingAugmentations) {
      double g = 0;
      for (PriorSet p : kAllPriorSets) g += matrix_->at(p, aug, e).pooled.f - matrix_->at(p, EmbeddingBlock::none, e).pooled.f;
      EXPECT_NEAR(gains.by_augmentation.at({e, aug}), g / 4.0, 1e-9);
      sum += gains.by_augmentation.at({e, aug});
    }
    EXPECT_NEAR(gains.by_embedding.at(e), sum / 3.0, 1e-9);
  }
}

TEST_F(MatrixTest, ReportsAreStableAndReparse) {
  auto gains = compute_gains(*matrix_);
  auto md = emit_report(*matrix_, gains, ReportFormat::markdown);
  auto opts = fast_options();
  opts.jobs = 2;
  auto again = run_matrix(corpus_->instances, *resources_, false, opts);
  EXPECT_EQ(emit_report(again, compute_gains(again), ReportFormat::markdown), md);

  auto parsed = parse_markdown_report(md);
  EXPECT_EQ(parsed.prf.size(), 64u);
  for (const auto& [key, report] : matrix_->cells) {
    EXPECT_NEAR(std::get<2>(parsed.prf.at(key)), report.pooled.f, 0.005 + 1e-12);
  }
  for (const auto& e : matrix_->embeddings) {
    double mean = 0;
    for (EmbeddingBlock aug : kEmbeddingAugmentations) mean += parsed.gains.at({e, aug});
    EXPECT_NEAR(parsed.embedding_gains.at(e), mean / 3.0, 0.0015);
  }

  auto tsv = emit_report(*matrix_, gains, ReportFormat::tsv);
  std::size_t rows = 0;
  for (std::size_t pos = 0; (pos = tsv.find('\n', pos)) != std::string::npos; ++pos) ++rows;
  EXPECT_GE(rows, 4u * 17u);
}

TEST(Gains, HandValues) {
  ResultMatrix m;
  m.embeddings = {"e"};
  m.vocabulary_sizes["e"] = 10;
  for (PriorSet p : kAllPriorSets) {
    for (EmbeddingBlock aug : kAllAugmentations) {
      MetricsReport r;
      r.config = {p, aug, "e"};
      r.pooled.f = aug == EmbeddingBlock::none ? 50.0 : aug == EmbeddingBlock::S ? 52.0 : aug == EmbeddingBlock::WS ? 51.0 : 53.0;
      m.cells[{p, aug, "e"}] = r;
    }
  }
  auto g = compute_gains(m);
  EXPECT_DOUBLE_EQ(g.by_augmentation.at({"e", EmbeddingBlock::S}), 2.0);
  EXPECT_DOUBLE_EQ(g.by_embedding.at("e"), 2.0);
  m.cells.erase({PriorSet::J, EmbeddingBlock::WS, "e"});
  EXPECT_THROW(compute_gains(m), IncompleteMatrixError);
}

TEST(Intersection, EqualVocabularySizes) {
  auto corpus = small_corpus(60, 3);
  auto r = four_embeddings(corpus);
  auto m = run_matrix(corpus.instances, r, true, fast_options());
  std::set<std::size_t> sizes;
  for (const auto& [name, n] : m.vocabulary_sizes) sizes.insert(n);
  EXPECT_EQ(sizes.size(), 1u);
  EXPECT_LT(*sizes.begin(), corpus.embeddings.size());
}

TEST(FormatFixed, RoundsAndAvoidsNegativeZero) {
  EXPECT_EQ(format_fixed(12.3456, 2), "12.35");
  EXPECT_EQ(format_fixed(-0.0001, 3), "0.000");
  EXPECT_DOUBLE_EQ(round_to(1.23456, 3), 1.235);
}
