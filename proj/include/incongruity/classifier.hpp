#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "incongruity/features.hpp"

namespace incongruity {

struct TrainConfig {
  double c = 20.0;        // regularization trade-off; lambda = 1 / (c * n)
  double w = 3.0;         // multiplier on positive-class hinge losses
  int epochs = 20;
  std::uint64_t seed = 0;
  double eta0 = 0.1;      // initial weight step
  double bias_eta0 = 0.01;

  void validate() const;
};

struct LabeledVector {
  FeatureVector features;
  bool positive = false;
};

// Linear scorer with a tuned decision threshold. Weights are indexed by
// FeatureId; ids past the end score as zero.
struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;
  double threshold = 0.0;
  std::vector<std::string> feature_names;  // optional, parallel to weights

  double score(const FeatureVector& fv) const;
  bool operator==(const LinearModel&) const = default;
};

struct Prediction {
  double score;
  bool positive;
};

// Positive-class precision/recall/F from confusion counts.
struct Confusion {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;

  double precision() const;
  double recall() const;
  double f1() const;
};

Confusion confusion(std::span<const double> scores, std::span<const bool> labels, double threshold);

// Threshold maximizing positive-class F over {every distinct score} U {extra
// candidates}. Ties go to the lower threshold.
double tune_threshold(std::span<const double> scores, std::span<const bool> labels,
                      std::span<const double> extra_candidates = {});

// Class-weighted hinge-loss SGD followed by F-maximizing threshold search on
// the training scores. Deterministic for a fixed seed. Throws
// DegenerateTrainingError when only one class is present.
LinearModel train(const std::vector<LabeledVector>& instances, const TrainConfig& config,
                  std::size_t feature_count = 0);

Prediction predict(const LinearModel& model, const FeatureVector& fv);

// Versioned text format; doubles written in shortest round-trip form.
void save_model(const LinearModel& model, const std::filesystem::path& path);
LinearModel load_model(const std::filesystem::path& path);
std::string serialize_model(const LinearModel& model);
LinearModel parse_model(std::string_view text);

}  // namespace incongruity
