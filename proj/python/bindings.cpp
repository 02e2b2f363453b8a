#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <map>
#include <string>
#include <vector>

#include "incongruity/embedding_store.hpp"
#include "incongruity/errors.hpp"
#include "incongruity/harness.hpp"
#include "incongruity/prior_features.hpp"
#include "incongruity/similarity_features.hpp"
#include "incongruity/synthetic.hpp"
#include "incongruity/text_pipeline.hpp"

namespace py = pybind11;
using namespace incongruity;

namespace {

using Pair = std::tuple<std::string, bool, std::string>;  // id, sarcastic, text

std::vector<LabeledInstance> to_instances(const std::vector<Pair>& rows) {
  std::vector<LabeledInstance> out;
  out.reserve(rows.size());
  for (const auto& [id, label, text] : rows) out.push_back({id, text, label});
  return out;
}

std::vector<Pair> from_instances(const std::vector<LabeledInstance>& instances) {
  std::vector<Pair> out;
  out.reserve(instances.size());
  for (const auto& inst : instances) out.emplace_back(inst.id, inst.sarcastic, inst.text);
  return out;
}

Resources make_resources(const std::vector<EmbeddingTable>& tables) {
  Resources r;
  for (const auto& t : tables) r.embeddings.emplace(t.name(), t);
  return r;
}

py::dict block_dict(const SimilarityBlock& b) {
  py::dict d;
  d["max_sim"] = b.max_sim;
  d["min_sim"] = b.min_sim;
  d["max_dissim"] = b.max_dissim;
  d["min_dissim"] = b.min_dissim;
  return d;
}

PairwiseScores matrix_arg(const std::vector<std::string>& words, const std::vector<std::vector<double>>& scores,
                          const std::vector<std::vector<std::size_t>>& distances) {
  std::vector<double> flat_scores;
  std::vector<std::size_t> flat_dist;
  for (const auto& row : scores) flat_scores.insert(flat_scores.end(), row.begin(), row.end());
  for (const auto& row : distances) flat_dist.insert(flat_dist.end(), row.begin(), row.end());
  return PairwiseScores(words, std::move(flat_scores), std::move(flat_dist));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Embedding-similarity sarcasm features (C++ core)";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  py::class_<EmbeddingTable>(m, "EmbeddingTable")
      .def(py::init([](std::string name, const std::vector<std::string>& words,
                       const std::vector<std::vector<float>>& vectors) {
             const std::size_t dim = vectors.empty() ? 0 : vectors.front().size();
             std::vector<float> flat;
             for (const auto& v : vectors) {
               if (v.size() != dim) throw std::invalid_argument("ragged vectors");
               flat.insert(flat.end(), v.begin(), v.end());
             }
             return EmbeddingTable(std::move(name), dim, words, std::move(flat));
           }),
           py::arg("name"), py::arg("words"), py::arg("vectors"))
      .def_property_readonly("name", &EmbeddingTable::name)
      .def_property_readonly("dimension", &EmbeddingTable::dimension)
      .def_property_readonly("vocab", &EmbeddingTable::vocab)
      .def("__len__", &EmbeddingTable::size)
      .def("__contains__", [](const EmbeddingTable& t, const std::string& w) { return t.contains(w); })
      .def("vector", [](const EmbeddingTable& t, const std::string& w) {
        auto v = t.lookup(w);
        if (v.empty()) throw py::key_error(w);
        return std::vector<float>(v.begin(), v.end());
      });

  py::class_<Metrics>(m, "Metrics")
      .def_readonly("precision", &Metrics::precision)
      .def_readonly("recall", &Metrics::recall)
      .def_readonly("f", &Metrics::f)
      .def("__repr__", [](const Metrics& x) {
        return "Metrics(P=" + format_fixed(x.precision, 2) + ", R=" + format_fixed(x.recall, 2) +
               ", F=" + format_fixed(x.f, 2) + ")";
      });

  m.def("load_embeddings", [](const std::filesystem::path& p) { return load_embeddings(p); }, py::arg("path"));
  m.def("intersect_vocabularies", &intersect_vocabularies, py::arg("tables"));
  m.def("cosine_similarity", [](const std::vector<float>& a, const std::vector<float>& b) {
    return cosine_similarity(a, b);
  });

  m.def("tokenize", [](const std::string& text) { return tokenize(text).tokens; }, py::arg("text"));

  m.def("unweighted_features",
        [](const std::vector<std::string>& words, const std::vector<std::vector<double>>& scores,
           const std::vector<std::vector<std::size_t>>& distances) {
          return block_dict(unweighted_features(matrix_arg(words, scores, distances)));
        },
        py::arg("words"), py::arg("scores"), py::arg("distances"));
  m.def("weighted_features",
        [](const std::vector<std::string>& words, const std::vector<std::vector<double>>& scores,
           const std::vector<std::vector<std::size_t>>& distances, double exponent) {
          return block_dict(weighted_features(matrix_arg(words, scores, distances), exponent));
        },
        py::arg("words"), py::arg("scores"), py::arg("distances"), py::arg("distance_exponent") = 2.0);

  m.def("embed_features",
        [](const std::string& text, const EmbeddingTable& table, const std::string& block) {
          return embed_features(tokenize(text), table, parse_embedding_block(block));
        },
        py::arg("text"), py::arg("table"), py::arg("block") = "S+WS");

  m.def("extract_features",
        [](const std::string& text, const std::string& config, const std::vector<EmbeddingTable>& embeddings) {
          return build_config_features(tokenize(text), parse_experiment_config(config), make_resources(embeddings));
        },
        py::arg("text"), py::arg("config"), py::arg("embeddings") = std::vector<EmbeddingTable>{});

  m.def("load_dataset", [](const std::filesystem::path& p) { return from_instances(load_dataset(p)); },
        py::arg("path"));

  m.def("generate_synthetic",
        [](std::size_t n, double skew, std::uint64_t seed, double separability, bool marker) {
          SyntheticSpec spec;
          spec.n = n;
          spec.skew = skew;
          spec.seed = seed;
          spec.separability = separability;
          spec.marker = marker;
          auto corpus = generate_synthetic(spec);
          return py::make_tuple(from_instances(corpus.instances), corpus.embeddings);
        },
        py::arg("n") = 500, py::arg("skew") = 0.2, py::arg("seed") = 0, py::arg("separability") = 1.0,
        py::arg("marker") = false);

  m.def("run_config",
        [](const std::string& config, const std::vector<Pair>& dataset, const std::vector<EmbeddingTable>& embeddings,
           std::size_t folds, std::uint64_t seed, double c, double w) {
          HarnessOptions options;
          options.folds = folds;
          options.seed = seed;
          options.train.c = c;
          options.train.w = w;
          py::gil_scoped_release release;
          return run_config(parse_experiment_config(config), to_instances(dataset), make_resources(embeddings), options)
              .pooled;
        },
        py::arg("config"), py::arg("dataset"), py::arg("embeddings") = std::vector<EmbeddingTable>{},
        py::arg("folds") = 5, py::arg("seed") = 0, py::arg("c") = 20.0, py::arg("w") = 3.0);
}
