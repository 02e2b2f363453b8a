#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace incongruity {

// Namespaced feature name -> value, as produced by the extractors. Values may
// be zero here (embedding blocks always emit their full cardinality).
using FeatureMap = std::map<std::string, double, std::less<>>;

// Adds every entry of `src` into `dst` (values are summed on name clashes).
void merge_into(FeatureMap& dst, const FeatureMap& src);

using FeatureId = std::uint32_t;

// Sparse vector over interned ids, sorted by id, with no explicit zeros.
struct FeatureVector {
  struct Entry {
    FeatureId id;
    double value;
    bool operator==(const Entry&) const = default;
  };
  std::vector<Entry> entries;

  std::size_t size() const { return entries.size(); }
  bool operator==(const FeatureVector&) const = default;
};

// Interns feature names to dense ids. Shared across an experiment: insertions
// serialize on a mutex, lookups may run concurrently. Once frozen, unknown
// names are dropped instead of interned.
class FeatureRegistry {
 public:
  FeatureRegistry() = default;
  FeatureRegistry(const FeatureRegistry& other);
  FeatureRegistry& operator=(const FeatureRegistry& other);

  FeatureId intern(std::string_view name);
  std::optional<FeatureId> find(std::string_view name) const;
  const std::string& name(FeatureId id) const;
  std::size_t size() const;

  void freeze();
  bool frozen() const;

  // Interns names unless frozen; drops unknown names when frozen. Zero values
  // are never stored in the result but their names are still interned.
  FeatureVector encode(const FeatureMap& features);

 private:
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, FeatureId> ids_;
  std::vector<std::string> names_;
  bool frozen_ = false;
};

}  // namespace incongruity
