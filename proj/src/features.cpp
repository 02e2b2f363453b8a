#include "incongruity/features.hpp"

#include <algorithm>
#include <stdexcept>

namespace incongruity {

void merge_into(FeatureMap& dst, const FeatureMap& src) {
  for (const auto& [name, value] : src) dst[name] += value;
}

FeatureRegistry::FeatureRegistry(const FeatureRegistry& other) {
  std::shared_lock lock(other.mutex_);
  ids_ = other.ids_;
  names_ = other.names_;
  frozen_ = other.frozen_;
}

FeatureRegistry& FeatureRegistry::operator=(const FeatureRegistry& other) {
  if (this == &other) return *this;
  std::scoped_lock lock(mutex_);
  std::shared_lock other_lock(other.mutex_);
  ids_ = other.ids_;
  names_ = other.names_;
  frozen_ = other.frozen_;
  return *this;
}

FeatureId FeatureRegistry::intern(std::string_view name) {
  {
    std::shared_lock lock(mutex_);
    if (auto it = ids_.find(std::string(name)); it != ids_.end()) return it->second;
    if (frozen_) throw std::logic_error("registry is frozen; cannot intern '" + std::string(name) + "'");
  }
  std::unique_lock lock(mutex_);
  auto [it, inserted] = ids_.emplace(std::string(name), static_cast<FeatureId>(names_.size()));
  if (inserted) names_.emplace_back(name);
  return it->second;
}

std::optional<FeatureId> FeatureRegistry::find(std::string_view name) const {
  std::shared_lock lock(mutex_);
  auto it = ids_.find(std::string(name));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

const std::string& FeatureRegistry::name(FeatureId id) const {
  std::shared_lock lock(mutex_);
  return names_.at(id);
}

std::size_t FeatureRegistry::size() const {
  std::shared_lock lock(mutex_);
  return names_.size();
}

void FeatureRegistry::freeze() {
  std::unique_lock lock(mutex_);
  frozen_ = true;
}

bool FeatureRegistry::frozen() const {
  std::shared_lock lock(mutex_);
  return frozen_;
}

FeatureVector FeatureRegistry::encode(const FeatureMap& features) {
  const bool grow = !frozen();
  FeatureVector out;
  out.entries.reserve(features.size());
  for (const auto& [name, value] : features) {
    std::optional<FeatureId> id = grow ? std::optional<FeatureId>(intern(name)) : find(name);
    if (!id || value == 0.0) continue;
    out.entries.push_back({*id, value});
  }
  std::sort(out.entries.begin(), out.entries.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

}  // namespace incongruity
