#pragma once

/// \file json_io.hpp
/// JSON forms of index sets, combination plans and evaluation caches.
/// Requires nlohmann/json.

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <optional>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "smolyak/cache.hpp"
#include "smolyak/decomposition.hpp"
#include "smolyak/error.hpp"
#include "smolyak/index_set.hpp"

namespace smolyak::json_io {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Dense form [i_0, ..., i_{d-1}].
inline json dense_index(const MultiIndex& i, std::size_t d) { return i.to_dense(d); }

/// Sparse form {"dim": value, ...} with nonzero entries only.
inline json sparse_index(const MultiIndex& i) {
  json out = json::object();
  for (const auto& e : i.entries()) out[std::to_string(e.dim)] = e.value;
  return out;
}

inline MultiIndex parse_index(const json& j) {
  if (j.is_array()) {
    std::vector<MultiIndex::value_type> dense;
    for (const auto& v : j) {
      if (!v.is_number_unsigned()) throw InvalidArgument("multi-index entries must be nonnegative integers");
      dense.push_back(v.get<MultiIndex::value_type>());
    }
    return MultiIndex::from_dense(dense);
  }
  if (j.is_object()) {
    std::vector<MultiIndex::Entry> entries;
    for (const auto& [key, v] : j.items()) {
      std::size_t pos = 0;
      unsigned long dim = 0;
      try {
        dim = std::stoul(key, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != key.size() || key.empty()) throw InvalidArgument("sparse multi-index key '" + key + "' is not a dimension");
      if (!v.is_number_unsigned() || v.get<unsigned long long>() == 0)
        throw InvalidArgument("sparse multi-index values must be positive integers");
      entries.push_back({static_cast<std::size_t>(dim), v.get<MultiIndex::value_type>()});
    }
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.dim < b.dim; });
    return MultiIndex::from_entries(std::move(entries));
  }
  throw InvalidArgument("multi-index must be an array or an object");
}

/// Finite-dimensional sets as arrays of dense arrays; unbounded ones as
/// arrays of sparse maps.
inline json to_json(const IndexSet& set) {
  json out = json::array();
  for (const auto& i : set)
    out.push_back(set.dimension().is_finite() ? dense_index(i, set.dimension().size()) : sparse_index(i));
  return out;
}

/// Parses either form. Dense arrays fix the dimension to their length; the
/// sparse form yields an unbounded set unless `ambient` is given.
inline IndexSet index_set_from_json(const json& j, std::optional<Dimension> ambient = std::nullopt) {
  if (!j.is_array()) throw InvalidArgument("index set must be a JSON array");
  std::vector<MultiIndex> members;
  std::optional<std::size_t> dense_d;
  for (const auto& row : j) {
    if (row.is_array()) {
      if (dense_d && *dense_d != row.size()) throw InvalidArgument("dense multi-indices differ in length");
      dense_d = row.size();
    }
    members.push_back(parse_index(row));
  }
  Dimension dim = ambient ? *ambient : (dense_d ? Dimension::finite(*dense_d) : Dimension::unbounded());
  return IndexSet(dim, std::move(members));
}

inline json to_json(const CombinationPlan& plan) {
  json terms = json::array();
  const Dimension dim = plan.source_set.dimension();
  for (const auto& t : plan.terms)
    terms.push_back({{"index", dim.is_finite() ? dense_index(t.index, dim.size()) : sparse_index(t.index)},
                     {"coeff", t.coefficient}});
  return {{"schema_version", kSchemaVersion}, {"terms", terms}, {"source_set", to_json(plan.source_set)}};
}

inline CombinationPlan plan_from_json(const json& j) {
  if (!j.is_object() || j.value("schema_version", 0) != kSchemaVersion)
    throw InvalidArgument("combination plan: unsupported or missing schema_version");
  CombinationPlan plan;
  plan.source_set = index_set_from_json(j.at("source_set"));
  for (const auto& t : j.at("terms")) {
    MultiIndex i = parse_index(t.at("index"));
    if (!plan.source_set.contains(i)) throw InvalidArgument("plan term " + i.to_string() + " outside source set");
    plan.terms.push_back({std::move(i), t.at("coeff").get<std::int64_t>()});
  }
  return plan;
}

/// Evaluators whose values nlohmann/json can round-trip.
template <class E>
concept SerializableEvaluator = Evaluator<E> && requires(const typename E::value_type& v, const json& j) {
  { json(v) };
  { j.get<typename E::value_type>() } -> std::same_as<typename E::value_type>;
};

template <SerializableEvaluator E>
json cache_to_json(const EvaluationCache<E>& cache) {
  json entries = json::array();
  for (const auto& [i, e] : cache.entries())
    entries.push_back({{"index", sparse_index(i)}, {"value", e.value}, {"work", e.work}});
  return {{"schema_version", kSchemaVersion}, {"dimension", cache.dimension().to_string()}, {"entries", entries}};
}

/// Loads entries into `cache`; conflicting values for cached keys are
/// rejected.
template <SerializableEvaluator E>
void cache_from_json(const json& j, EvaluationCache<E>& cache) {
  if (!j.is_object() || j.value("schema_version", 0) != kSchemaVersion)
    throw InvalidArgument("cache file: unsupported or missing schema_version");
  if (j.value("dimension", std::string{}) != cache.dimension().to_string())
    throw InvalidArgument("cache file: dimension does not match the evaluator");
  for (const auto& e : j.at("entries")) {
    MultiIndex i = parse_index(e.at("index"));
    if (!i.fits(cache.dimension())) throw InvalidArgument("cache file: index " + i.to_string() + " out of range");
    const double work = e.at("work").get<double>();
    if (!(work > 0)) throw InvalidArgument("cache file: nonpositive work");
    cache.insert(i, {e.at("value").get<typename E::value_type>(), work});
  }
}

}  // namespace smolyak::json_io
