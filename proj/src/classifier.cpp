#include "incongruity/classifier.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "incongruity/errors.hpp"

namespace incongruity {

namespace {

constexpr std::string_view kModelMagic = "incongruity-linear-model";
constexpr int kModelVersion = 1;

std::string shortest(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

double parse_double(std::string_view s, std::size_t lineno) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw FormatError("bad number '" + std::string(s) + "'", lineno);
  }
  return v;
}

// F comparison without rounding: F = 2tp / (2tp + fp + fn).
int compare_f(const Confusion& a, const Confusion& b) {
  const unsigned long long na = 2 * a.tp, da = 2 * a.tp + a.fp + a.fn;
  const unsigned long long nb = 2 * b.tp, db = 2 * b.tp + b.fp + b.fn;
  if (na == 0 || nb == 0) return na == nb ? 0 : na == 0 ? -1 : 1;
  const unsigned long long lhs = na * db, rhs = nb * da;
  return lhs < rhs ? -1 : lhs > rhs ? 1 : 0;
}

double dot_scaled(const std::vector<double>& v, const FeatureVector& x) {
  double s = 0;
  for (const auto& e : x.entries) {
    if (e.id < v.size()) s += v[e.id] * e.value;
  }
  return s;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(c > 0)) throw ConfigError("c must be positive");
  if (!(w >= 1)) throw ConfigError("w must be at least 1");
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (!(eta0 > 0) || !(bias_eta0 >= 0)) throw ConfigError("learning rates must be positive");
}

double LinearModel::score(const FeatureVector& fv) const { return dot_scaled(weights, fv) + bias; }

double Confusion::precision() const { return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp); }
double Confusion::recall() const { return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn); }
double Confusion::f1() const {
  const auto den = 2 * tp + fp + fn;
  return tp == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(den);
}

Confusion confusion(std::span<const double> scores, std::span<const bool> labels, double threshold) {
  Confusion c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (predicted && labels[i]) ++c.tp;
    else if (predicted) ++c.fp;
    else if (labels[i]) ++c.fn;
    else ++c.tn;
  }
  return c;
}

double tune_threshold(std::span<const double> scores, std::span<const bool> labels,
                      std::span<const double> extra_candidates) {
  if (scores.size() != labels.size()) throw std::invalid_argument("tune_threshold: size mismatch");
  if (scores.empty()) return 0.0;

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  const std::size_t positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));

  // Sweep thresholds from high to low; each distinct score admits its whole tie group.
  double best_threshold = scores[order.front()];
  Confusion best{0, 0, positives, scores.size() - positives};
  bool have_best = false;
  Confusion running{0, 0, positives, scores.size() - positives};
  for (std::size_t k = 0; k < order.size();) {
    const double s = scores[order[k]];
    while (k < order.size() && scores[order[k]] == s) {
      if (labels[order[k]]) {
        ++running.tp;
        --running.fn;
      } else {
        ++running.fp;
        --running.tn;
      }
      ++k;
    }
    // >= keeps moving toward lower thresholds on ties.
    if (!have_best || compare_f(running, best) >= 0) {
      best = running;
      best_threshold = s;
      have_best = true;
    }
  }
  for (double t : extra_candidates) {
    Confusion c = confusion(scores, labels, t);
    int cmp = compare_f(c, best);
    if (cmp > 0 || (cmp == 0 && t < best_threshold)) {
      best = c;
      best_threshold = t;
    }
  }
  return best_threshold;
}

LinearModel train(const std::vector<LabeledVector>& instances, const TrainConfig& config, std::size_t feature_count) {
  config.validate();
  const std::size_t n = instances.size();
  const auto positives = std::count_if(instances.begin(), instances.end(), [](const auto& x) { return x.positive; });
  if (n < 2 || positives == 0 || static_cast<std::size_t>(positives) == n) {
    throw DegenerateTrainingError("training needs both classes and at least two instances");
  }

  std::size_t dim = feature_count;
  for (const auto& inst : instances) {
    for (const auto& e : inst.features.entries) dim = std::max<std::size_t>(dim, e.id + 1);
  }

  // w = scale * v keeps the L2 shrink O(1) per step.
  const double lambda = 1.0 / (config.c * static_cast<double>(n));
  std::vector<double> v(dim, 0.0);
  double scale = 1.0;
  double bias = 0.0;
  double t = 0.0;

  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng() % (i + 1)]);

    for (std::size_t idx : order) {
      const auto& inst = instances[idx];
      const double decay = 1.0 + lambda * config.eta0 * t;
      const double eta = config.eta0 / decay;
      const double bias_eta = config.bias_eta0 / decay;
      const double y = inst.positive ? 1.0 : -1.0;
      const double cost = inst.positive ? config.w : 1.0;
      const double z = y * (scale * dot_scaled(v, inst.features) + bias);

      scale *= 1.0 - eta * lambda;
      if (z < 1.0) {
        const double step = eta * cost * y / scale;
        for (const auto& e : inst.features.entries) v[e.id] += step * e.value;
        bias += bias_eta * cost * y;
      }
      if (scale < 1e-9) {
        for (double& x : v) x *= scale;
        scale = 1.0;
      }
      t += 1.0;
    }

    if (!std::isfinite(bias) || !std::isfinite(scale) ||
        !std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); })) {
      throw DegenerateTrainingError("non-finite weights after epoch " + std::to_string(epoch + 1));
    }
  }

  LinearModel model;
  model.weights.resize(dim);
  for (std::size_t k = 0; k < dim; ++k) model.weights[k] = scale * v[k];
  model.bias = bias;

  std::vector<double> scores(n);
  auto labels = std::make_unique<bool[]>(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = model.score(instances[i].features);
    labels[i] = instances[i].positive;
  }
  const double zero = 0.0;
  model.threshold = tune_threshold(scores, std::span<const bool>(labels.get(), n), std::span<const double>(&zero, 1));
  return model;
}

Prediction predict(const LinearModel& model, const FeatureVector& fv) {
  const double s = model.score(fv);
  return {s, s >= model.threshold};
}

std::string serialize_model(const LinearModel& model) {
  std::ostringstream out;
  out << kModelMagic << ' ' << kModelVersion << '\n';
  out << "dimension " << model.weights.size() << '\n';
  out << "bias " << shortest(model.bias) << '\n';
  out << "threshold " << shortest(model.threshold) << '\n';
  std::size_t nonzero = std::count_if(model.weights.begin(), model.weights.end(), [](double x) { return x != 0.0; });
  out << "weights " << nonzero << '\n';
  for (std::size_t k = 0; k < model.weights.size(); ++k) {
    if (model.weights[k] == 0.0) continue;
    out << k << '\t' << shortest(model.weights[k]) << '\t'
        << (k < model.feature_names.size() ? model.feature_names[k] : std::string("-")) << '\n';
  }
  return out.str();
}

LinearModel parse_model(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  auto next = [&]() -> std::string& {
    if (!std::getline(in, line)) throw FormatError("unexpected end of model file", lineno + 1);
    ++lineno;
    return line;
  };
  auto field = [&](std::string_view key) -> std::string {
    std::string& l = next();
    if (l.rfind(std::string(key) + " ", 0) != 0) throw FormatError("expected '" + std::string(key) + "'", lineno);
    return l.substr(key.size() + 1);
  };

  {
    std::string& header = next();
    if (header != std::string(kModelMagic) + " " + std::to_string(kModelVersion)) {
      throw FormatError("not a version " + std::to_string(kModelVersion) + " model file", lineno);
    }
  }
  LinearModel model;
  const auto dim = static_cast<std::size_t>(parse_double(field("dimension"), lineno));
  model.weights.assign(dim, 0.0);
  model.bias = parse_double(field("bias"), lineno);
  model.threshold = parse_double(field("threshold"), lineno);
  const auto count = static_cast<std::size_t>(parse_double(field("weights"), lineno));
  std::vector<std::string> names(dim);
  bool any_name = false;
  for (std::size_t r = 0; r < count; ++r) {
    std::string& l = next();
    auto t1 = l.find('\t');
    auto t2 = t1 == std::string::npos ? std::string::npos : l.find('\t', t1 + 1);
    if (t2 == std::string::npos) throw FormatError("expected '<id>\\t<weight>\\t<name>'", lineno);
    const auto id = static_cast<std::size_t>(parse_double(std::string_view(l).substr(0, t1), lineno));
    if (id >= dim) throw FormatError("feature id out of range", lineno);
    model.weights[id] = parse_double(std::string_view(l).substr(t1 + 1, t2 - t1 - 1), lineno);
    if (!std::isfinite(model.weights[id])) throw FormatError("non-finite weight", lineno);
    std::string name = l.substr(t2 + 1);
    if (name != "-") {
      names[id] = std::move(name);
      any_name = true;
    }
  }
  if (any_name) model.feature_names = std::move(names);
  return model;
}

void save_model(const LinearModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write model " + path.string());
  out << serialize_model(model);
}

LinearModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open model " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

}  // namespace incongruity
