#pragma once

/// \file decomposition.hpp
/// Mixed differences of an evaluator and the combination-rule coefficients
/// that turn sum_{i in I} mixed_difference(i) into sum_{i in I} c_i N(i).

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "smolyak/cache.hpp"
#include "smolyak/error.hpp"
#include "smolyak/evaluator.hpp"
#include "smolyak/index_set.hpp"

namespace smolyak {

struct StencilTerm {
  MultiIndex index;
  int sign;
};

/// The 2^k shifted indices i - e, e in {0,1}^d restricted to the support of
/// i (k = support size), with signs (-1)^{|e|_1}.
inline std::vector<StencilTerm> mixed_difference_stencil(const MultiIndex& i) {
  const auto entries = i.entries();
  const std::size_t k = entries.size();
  if (k >= 63) throw InvalidArgument("mixed difference stencil too large: support " + std::to_string(k));
  std::vector<StencilTerm> stencil;
  stencil.reserve(std::size_t{1} << k);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
    MultiIndex shifted = i;
    int sign = 1;
    for (std::size_t b = 0; b < k; ++b)
      if (mask & (std::uint64_t{1} << b)) {
        shifted.set(entries[b].dim, entries[b].value - 1);
        sign = -sign;
      }
    stencil.push_back({std::move(shifted), sign});
  }
  return stencil;
}

/// Mixed difference of N at i, evaluated through the cache.
template <Evaluator E>
typename E::value_type mixed_difference(EvaluationCache<E>& cache, const MultiIndex& i) {
  using V = typename E::value_type;
  const auto stencil = mixed_difference_stencil(i);
  const V& first = cache.get(stencil.front().index).value;
  V acc = first;
  for (std::size_t k = 1; k < stencil.size(); ++k)
    ValueTraits<V>::axpy(static_cast<double>(stencil[k].sign), cache.get(stencil[k].index).value, acc);
  return acc;
}

template <Evaluator E>
typename E::value_type mixed_difference(const E& evaluator, const MultiIndex& i) {
  EvaluationCache<E> cache(evaluator);
  return mixed_difference(cache, i);
}

/// Sum of the work of every evaluation in i's stencil.
template <Evaluator E>
double mixed_difference_work(EvaluationCache<E>& cache, const MultiIndex& i) {
  double w = 0.0;
  for (const auto& t : mixed_difference_stencil(i)) w += cache.get(t.index).work;
  return w;
}

/// Sum of mixed differences over the rectangle {0..i_0} x ... ; equals N(i).
template <Evaluator E>
typename E::value_type rectangular_sum(EvaluationCache<E>& cache, const MultiIndex& i) {
  using V = typename E::value_type;
  std::vector<MultiIndex::value_type> bound;
  std::vector<std::size_t> dims;
  for (const auto& e : i.entries()) {
    dims.push_back(e.dim);
    bound.push_back(e.value);
  }
  const IndexSet rect = box_set(bound);
  std::optional<V> acc;
  for (const auto& local : rect) {
    MultiIndex s;
    for (const auto& e : local.entries()) s.set(dims[e.dim], e.value);
    V term = mixed_difference(cache, s);
    if (!acc)
      acc = std::move(term);
    else
      ValueTraits<V>::axpy(1.0, term, *acc);
  }
  return std::move(*acc);
}

template <Evaluator E>
typename E::value_type rectangular_sum(const E& evaluator, const MultiIndex& i) {
  EvaluationCache<E> cache(evaluator);
  return rectangular_sum(cache, i);
}

struct PlanTerm {
  MultiIndex index;
  std::int64_t coefficient;
  friend bool operator==(const PlanTerm&, const PlanTerm&) = default;
};

/// Executable form of Smolyak's algorithm: S_I(N) = sum_terms c_i N(i).
/// Terms are in canonical order; zero coefficients are omitted.
struct CombinationPlan {
  std::vector<PlanTerm> terms;
  IndexSet source_set;

  std::int64_t coefficient_sum() const {
    std::int64_t s = 0;
    for (const auto& t : terms) s += t.coefficient;
    return s;
  }

  std::vector<MultiIndex> indices() const {
    std::vector<MultiIndex> out;
    out.reserve(terms.size());
    for (const auto& t : terms) out.push_back(t.index);
    return out;
  }
};

/// c_i = sum_{e in {0,1}^d, i+e in I} (-1)^{|e|_1} for every i in I.
inline CombinationPlan combination_coefficients(const IndexSet& set) {
  if (!set.is_downward_closed())
    throw InvalidArgument("combination_coefficients requires a downward-closed set");
  CombinationPlan plan{{}, set};
  std::vector<std::size_t> directions;
  if (set.dimension().is_finite())
    for (std::size_t d = 0; d < set.dimension().size(); ++d) directions.push_back(d);
  else
    directions = set.used_dimensions();
  for (const auto& i : set) {
    // Only directions with i + e_j in I can contribute: by downward closure
    // any i + e containing another direction lies outside I.
    std::vector<std::size_t> open;
    for (std::size_t d : directions)
      if (set.contains(i.incremented(d))) open.push_back(d);
    if (open.size() >= 63) throw InvalidArgument("combination_coefficients: too many directions");
    std::int64_t c = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << open.size()); ++mask) {
      MultiIndex j = i;
      int sign = 1;
      for (std::size_t b = 0; b < open.size(); ++b)
        if (mask & (std::uint64_t{1} << b)) {
          j = j.incremented(open[b]);
          sign = -sign;
        }
      if (mask == 0 || set.contains(j)) c += sign;
    }
    if (c != 0) plan.terms.push_back({i, c});
  }
  return plan;
}

inline std::int64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (std::uint64_t t = 1; t <= k; ++t) r = r * static_cast<std::int64_t>(n - k + t) / static_cast<std::int64_t>(t);
  return r;
}

/// Closed form for the simplex {|i|_1 <= L}:
/// c_i = (-1)^{L-|i|_1} binom(d-1, L-|i|_1) for L-d+1 <= |i|_1 <= L.
inline CombinationPlan simplex_coefficients(std::size_t d, unsigned level) {
  if (d == 0) throw InvalidArgument("simplex_coefficients: d must be at least 1");
  IndexSet simplex = simplex_set(d, level);
  CombinationPlan plan{{}, simplex};
  for (const auto& i : simplex) {
    const std::uint64_t gap = level - i.l1();
    if (gap > d - 1) continue;
    const std::int64_t c = (gap % 2 ? -1 : 1) * binomial(d - 1, gap);
    if (c != 0) plan.terms.push_back({i, c});
  }
  return plan;
}

}  // namespace smolyak
