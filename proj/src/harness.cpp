#include "incongruity/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "json.hpp"

#include "incongruity/errors.hpp"

namespace incongruity {

namespace {

bool parse_label(std::string_view token, std::size_t lineno) {
  if (token == "1") return true;
  if (token == "0") return false;
  throw ParseError("bad label '" + std::string(token) + "' (expected 0 or 1)", lineno);
}

void check_and_push(std::vector<LabeledInstance>& out, std::unordered_set<std::string>& ids, LabeledInstance inst,
                    std::size_t lineno) {
  if (inst.id.empty()) throw ParseError("empty id", lineno);
  if (inst.text.find_first_not_of(" \t\r\n") == std::string::npos) throw ParseError("empty text", lineno);
  if (!ids.insert(inst.id).second) throw ParseError("duplicate id '" + inst.id + "'", lineno);
  out.push_back(std::move(inst));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads; rethrows the first failure by index.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  for (unsigned t = 0; t < std::min<std::size_t>(jobs, n); ++t) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string block_label(PriorSet prior, EmbeddingBlock aug) {
  return aug == EmbeddingBlock::none ? to_string(prior) : "+" + to_string(aug);
}

}  // namespace

std::vector<LabeledInstance> parse_dataset_tsv(std::string_view text) {
  std::vector<LabeledInstance> out;
  std::unordered_set<std::string> ids;
  std::size_t lineno = 0;
  for (auto line : lines_of(text)) {
    ++lineno;
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    auto t1 = line.find('\t');
    auto t2 = t1 == std::string_view::npos ? std::string_view::npos : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos) throw ParseError("expected '<id>\\t<label>\\t<text>'", lineno);
    LabeledInstance inst;
    inst.id = std::string(line.substr(0, t1));
    inst.sarcastic = parse_label(line.substr(t1 + 1, t2 - t1 - 1), lineno);
    inst.text = std::string(line.substr(t2 + 1));
    check_and_push(out, ids, std::move(inst), lineno);
  }
  return out;
}

std::vector<LabeledInstance> parse_dataset_jsonl(std::string_view text) {
  std::vector<LabeledInstance> out;
  std::unordered_set<std::string> ids;
  std::size_t lineno = 0;
  for (auto line : lines_of(text)) {
    ++lineno;
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), lineno);
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("label") || !j.contains("text") || !j["text"].is_string()) {
      throw ParseError("record needs id, label and text fields", lineno);
    }
    LabeledInstance inst;
    const auto& id = j["id"];
    inst.id = id.is_string() ? id.get<std::string>() : id.dump();
    const auto& label = j["label"];
    if (label.is_number_integer()) {
      inst.sarcastic = parse_label(std::to_string(label.get<long long>()), lineno);
    } else if (label.is_string()) {
      inst.sarcastic = parse_label(label.get<std::string>(), lineno);
    } else if (label.is_boolean()) {
      inst.sarcastic = label.get<bool>();
    } else {
      throw ParseError("bad label " + label.dump(), lineno);
    }
    inst.text = j["text"].get<std::string>();
    check_and_push(out, ids, std::move(inst), lineno);
  }
  return out;
}

std::vector<LabeledInstance> load_dataset(const std::filesystem::path& path) {
  std::string text = read_file(path);
  return path.extension() == ".jsonl" ? parse_dataset_jsonl(text) : parse_dataset_tsv(text);
}

void save_dataset(const std::vector<LabeledInstance>& instances, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path.string());
  const bool jsonl = path.extension() == ".jsonl";
  for (const auto& inst : instances) {
    if (jsonl) {
      out << nlohmann::json{{"id", inst.id}, {"label", inst.sarcastic ? 1 : 0}, {"text", inst.text}}.dump() << '\n';
    } else {
      out << inst.id << '\t' << (inst.sarcastic ? 1 : 0) << '\t' << inst.text << '\n';
    }
  }
}

std::vector<Fold> stratified_kfold(const std::vector<bool>& labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw SplitError("need at least 2 folds");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? pos : neg).push_back(i);
  if (pos.size() < k || neg.size() < k) {
    throw SplitError("each class needs at least " + std::to_string(k) + " members (have " +
                     std::to_string(pos.size()) + " positive, " + std::to_string(neg.size()) + " negative)");
  }

  std::mt19937_64 rng(seed);
  auto shuffle = [&](std::vector<std::size_t>& v) {
    for (std::size_t i = v.size() - 1; i > 0; --i) std::swap(v[i], v[rng() % (i + 1)]);
  };
  shuffle(pos);
  shuffle(neg);

  std::vector<std::size_t> fold_of(labels.size());
  for (std::size_t i = 0; i < pos.size(); ++i) fold_of[pos[i]] = i % k;
  // Continue dealing where the positives stopped so fold sizes stay within one.
  const std::size_t offset = pos.size() % k;
  for (std::size_t i = 0; i < neg.size(); ++i) fold_of[neg[i]] = (offset + i) % k;

  std::vector<Fold> folds(k);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t f = 0; f < k; ++f) (fold_of[i] == f ? folds[f].test : folds[f].train).push_back(i);
  }
  return folds;
}

std::vector<Fold> stratified_kfold(const std::vector<LabeledInstance>& instances, std::size_t k, std::uint64_t seed) {
  std::vector<bool> labels;
  labels.reserve(instances.size());
  for (const auto& inst : instances) labels.push_back(inst.sarcastic);
  return stratified_kfold(labels, k, seed);
}

Metrics Metrics::from(const Confusion& c) {
  Metrics m;
  m.counts = c;
  m.precision = 100.0 * c.precision();
  m.recall = 100.0 * c.recall();
  m.f = m.precision + m.recall > 0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

PreparedCorpus PreparedCorpus::from(const std::vector<LabeledInstance>& instances) {
  PreparedCorpus corpus;
  corpus.sentences.reserve(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    try {
      corpus.sentences.push_back(tokenize(instances[i].text));
    } catch (const EmptySentenceError&) {
      throw ParseError("instance '" + instances[i].id + "' has no tokens");
    }
    corpus.labels.push_back(instances[i].sarcastic);
  }
  return corpus;
}

std::vector<FeatureMap> extract_all(const PreparedCorpus& corpus, const ExperimentConfig& config,
                                    const Resources& resources) {
  std::vector<FeatureMap> out;
  out.reserve(corpus.sentences.size());
  for (const auto& s : corpus.sentences) out.push_back(build_config_features(s, config, resources));
  return out;
}

MetricsReport run_config(const ExperimentConfig& config, const std::vector<LabeledInstance>& instances,
                         const Resources& resources, const HarnessOptions& options) {
  resources.validate(config);
  return run_config(config, PreparedCorpus::from(instances), resources, options);
}

MetricsReport run_config(const ExperimentConfig& config, const PreparedCorpus& corpus, const Resources& resources,
                         const HarnessOptions& options) {
  resources.validate(config);
  options.train.validate();
  const auto folds = stratified_kfold(corpus.labels, options.folds, options.seed);
  const auto features = extract_all(corpus, config, resources);

  MetricsReport report;
  report.config = config;
  Confusion pooled;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    try {
      FeatureRegistry registry;
      std::vector<LabeledVector> train_set;
      train_set.reserve(folds[f].train.size());
      for (std::size_t i : folds[f].train) train_set.push_back({registry.encode(features[i]), corpus.labels[i]});
      registry.freeze();

      FoldDiagnostics diag;
      diag.registry_size_after_train = registry.size();
      TrainConfig tc = options.train;
      tc.seed = options.train.seed + f;
      const LinearModel model = train(train_set, tc, registry.size());

      std::set<std::string_view> unseen;
      Confusion fold_counts;
      for (std::size_t i : folds[f].test) {
        for (const auto& [name, value] : features[i]) {
          if (!registry.find(name)) unseen.insert(name);
        }
        const auto p = predict(model, registry.encode(features[i]));
        const bool actual = corpus.labels[i];
        if (p.positive && actual) ++fold_counts.tp;
        else if (p.positive) ++fold_counts.fp;
        else if (actual) ++fold_counts.fn;
        else ++fold_counts.tn;
        report.predictions.push_back({i, f, p.score, p.positive, actual});
      }
      diag.registry_size_after_test = registry.size();
      diag.unseen_test_features = unseen.size();
      report.diagnostics.push_back(diag);
      report.folds.push_back(Metrics::from(fold_counts));
      pooled.tp += fold_counts.tp;
      pooled.fp += fold_counts.fp;
      pooled.fn += fold_counts.fn;
      pooled.tn += fold_counts.tn;
    } catch (const FoldError&) {
      throw;
    } catch (const Error& e) {
      throw FoldError(f, e.what());
    }
  }
  report.pooled = Metrics::from(pooled);
  return report;
}

const MetricsReport& ResultMatrix::at(PriorSet prior, EmbeddingBlock aug, const std::string& embedding) const {
  auto it = cells.find({prior, aug, embedding});
  if (it == cells.end()) {
    throw IncompleteMatrixError("missing cell " + to_string(prior) + "/" + to_string(aug) + "/" + embedding);
  }
  return it->second;
}

ResultMatrix run_matrix(const std::vector<LabeledInstance>& instances, const Resources& resources, bool intersect,
                        const HarnessOptions& options, std::vector<std::string> embedding_order) {
  if (embedding_order.empty()) {
    for (const auto& [name, table] : resources.embeddings) embedding_order.push_back(name);
  }
  if (embedding_order.empty()) throw ConfigError("run_matrix needs at least one embedding");

  Resources local = resources;
  if (intersect) {
    std::vector<EmbeddingTable> tables;
    for (const auto& name : embedding_order) tables.push_back(resources.embedding(name));
    auto reduced = intersect_vocabularies(tables);
    for (std::size_t i = 0; i < embedding_order.size(); ++i) local.embeddings[embedding_order[i]] = std::move(reduced[i]);
  }

  ResultMatrix matrix;
  matrix.embeddings = embedding_order;
  matrix.intersected = intersect;
  matrix.options = options;
  for (const auto& name : embedding_order) matrix.vocabulary_sizes[name] = local.embedding(name).size();

  std::vector<ExperimentConfig> jobs;
  for (PriorSet prior : kAllPriorSets) {
    jobs.push_back({prior, EmbeddingBlock::none, "", intersect});
    for (const auto& emb : embedding_order) {
      for (EmbeddingBlock aug : kEmbeddingAugmentations) {
        jobs.push_back({prior, aug, emb, intersect});
      }
    }
  }
  for (const auto& job : jobs) local.validate(job);

  const PreparedCorpus corpus = PreparedCorpus::from(instances);
  std::vector<MetricsReport> results(jobs.size());
  parallel_for(jobs.size(), options.jobs, [&](std::size_t i) { results[i] = run_config(jobs[i], corpus, local, options); });

  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& cfg = jobs[i];
    if (cfg.augmentation == EmbeddingBlock::none) {
      // Feature-identical across embeddings; keyed per column for the report.
      for (const auto& emb : embedding_order) {
        MetricsReport copy = results[i];
        copy.config.embedding = emb;
        matrix.cells.emplace(CellKey{cfg.prior_set, cfg.augmentation, emb}, std::move(copy));
      }
    } else {
      matrix.cells.emplace(CellKey{cfg.prior_set, cfg.augmentation, cfg.embedding}, std::move(results[i]));
    }
  }
  return matrix;
}

GainTable compute_gains(const ResultMatrix& matrix) {
  GainTable gains;
  gains.embeddings = matrix.embeddings;
  for (const auto& emb : matrix.embeddings) {
    double total = 0;
    for (EmbeddingBlock aug : kEmbeddingAugmentations) {
      double sum = 0;
      for (PriorSet prior : kAllPriorSets) {
        sum += matrix.at(prior, aug, emb).pooled.f - matrix.at(prior, EmbeddingBlock::none, emb).pooled.f;
      }
      const double mean = sum / 4.0;
      gains.by_augmentation[{emb, aug}] = mean;
      total += mean;
    }
    gains.by_embedding[emb] = total / 3.0;
  }
  return gains;
}

std::string format_fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
  std::string s(buf);
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

double round_to(double value, int digits) { return std::stod(format_fixed(value, digits)); }

std::string emit_report(const ResultMatrix& matrix, const GainTable& gains, ReportFormat format) {
  for (const auto& emb : matrix.embeddings) {
    for (PriorSet prior : kAllPriorSets) {
      for (EmbeddingBlock aug : kAllAugmentations) matrix.at(prior, aug, emb);
    }
  }

  std::ostringstream out;
  if (format == ReportFormat::tsv) {
    for (const auto& emb : matrix.embeddings) {
      out << "prior\taugmentation\tembedding\tP\tR\tF\n";
      for (PriorSet prior : kAllPriorSets) {
        for (EmbeddingBlock aug : kAllAugmentations) {
          const auto& m = matrix.at(prior, aug, emb).pooled;
          out << to_string(prior) << '\t' << to_string(aug) << '\t' << emb << '\t' << format_fixed(m.precision, 2)
              << '\t' << format_fixed(m.recall, 2) << '\t' << format_fixed(m.f, 2) << '\n';
        }
      }
    }
    out << "embedding\taugmentation\tmean_f_gain\n";
    for (const auto& emb : gains.embeddings) {
      for (EmbeddingBlock aug : kEmbeddingAugmentations) {
        out << emb << '\t' << to_string(aug) << '\t' << format_fixed(gains.by_augmentation.at({emb, aug}), 3) << '\n';
      }
    }
    out << "embedding\tmean_f_gain\n";
    for (const auto& emb : gains.embeddings) out << emb << '\t' << format_fixed(gains.by_embedding.at(emb), 3) << '\n';
    return out.str();
  }

  const auto& o = matrix.options;
  out << "# Embedding-feature augmentation results\n\n";
  out << "<!-- classifier: class-weighted hinge SGD with F-maximizing threshold (stand-in for SVM-perf F-loss);"
      << " folds=" << o.folds << " seed=" << o.seed << " c=" << format_fixed(o.train.c, 2)
      << " w=" << format_fixed(o.train.w, 2) << " epochs=" << o.train.epochs << " -->\n\n";
  out << "Vocabulary intersection: " << (matrix.intersected ? "yes" : "no") << "\n\n";
  for (const auto& emb : matrix.embeddings) {
    out << "## Embedding: " << emb << " (vocabulary " << matrix.vocabulary_sizes.at(emb) << ")\n\n";
    out << "| Features | P | R | F |\n|---|---|---|---|\n";
    for (PriorSet prior : kAllPriorSets) {
      for (EmbeddingBlock aug : kAllAugmentations) {
        const auto& m = matrix.at(prior, aug, emb).pooled;
        out << "| " << block_label(prior, aug) << " | " << format_fixed(m.precision, 2) << " | "
            << format_fixed(m.recall, 2) << " | " << format_fixed(m.f, 2) << " |\n";
      }
    }
    out << "\n";
  }

  out << "## Average F gain by augmentation\n\n| Augmentation |";
  for (const auto& emb : gains.embeddings) out << ' ' << emb << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < gains.embeddings.size(); ++i) out << "---|";
  out << "\n";
  for (EmbeddingBlock aug : kEmbeddingAugmentations) {
    out << "| +" << to_string(aug) << " |";
    for (const auto& emb : gains.embeddings) out << ' ' << format_fixed(gains.by_augmentation.at({emb, aug}), 3) << " |";
    out << "\n";
  }
  out << "\n## Average F gain by embedding\n\n| Embedding | Gain |\n|---|---|\n";
  for (const auto& emb : gains.embeddings) out << "| " << emb << " | " << format_fixed(gains.by_embedding.at(emb), 3) << " |\n";
  return out.str();
}

ParsedReport parse_markdown_report(std::string_view text) {
  auto cells_of = [](std::string_view line) {
    std::vector<std::string> cells;
    std::size_t pos = 1;
    while (pos < line.size()) {
      auto bar = line.find('|', pos);
      if (bar == std::string_view::npos) break;
      auto cell = line.substr(pos, bar - pos);
      auto b = cell.find_first_not_of(' ');
      auto e = cell.find_last_not_of(' ');
      cells.emplace_back(b == std::string_view::npos ? std::string_view{} : cell.substr(b, e - b + 1));
      pos = bar + 1;
    }
    return cells;
  };

  ParsedReport report;
  enum class Section { none, embedding, gain_aug, gain_emb } section = Section::none;
  std::string embedding;
  PriorSet prior = PriorSet::L;
  std::vector<std::string> gain_columns;
  std::size_t lineno = 0;
  for (auto line : lines_of(text)) {
    ++lineno;
    if (line.rfind("## Embedding: ", 0) == 0) {
      section = Section::embedding;
      auto rest = line.substr(14);
      embedding = std::string(rest.substr(0, rest.find(" (vocabulary")));
      continue;
    }
    if (line.rfind("## Average F gain by augmentation", 0) == 0) {
      section = Section::gain_aug;
      gain_columns.clear();
      continue;
    }
    if (line.rfind("## Average F gain by embedding", 0) == 0) {
      section = Section::gain_emb;
      continue;
    }
    if (line.empty() || line.front() != '|' || line.rfind("|---", 0) == 0) continue;
    auto cells = cells_of(line);
    try {
      switch (section) {
        case Section::embedding: {
          if (cells.size() != 4 || cells[0] == "Features") break;
          EmbeddingBlock aug = EmbeddingBlock::none;
          if (cells[0].front() == '+') {
            aug = parse_embedding_block(cells[0].substr(1));
          } else {
            prior = parse_prior_set(cells[0]);
          }
          report.prf[{prior, aug, embedding}] = {std::stod(cells[1]), std::stod(cells[2]), std::stod(cells[3])};
          break;
        }
        case Section::gain_aug:
          if (cells[0] == "Augmentation") {
            gain_columns.assign(cells.begin() + 1, cells.end());
            break;
          }
          for (std::size_t c = 1; c < cells.size() && c - 1 < gain_columns.size(); ++c) {
            report.gains[{gain_columns[c - 1], parse_embedding_block(cells[0].substr(1))}] = std::stod(cells[c]);
          }
          break;
        case Section::gain_emb:
          if (cells.size() == 2 && cells[0] != "Embedding") report.embedding_gains[cells[0]] = std::stod(cells[1]);
          break;
        case Section::none:
          break;
      }
    } catch (const std::exception& e) {
      throw ParseError(std::string("bad report row: ") + e.what(), lineno);
    }
  }
  return report;
}

}  // namespace incongruity
