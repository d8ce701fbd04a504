#pragma once

/// \file engine.hpp
/// Smolyak's algorithm S_I(N) over an arbitrary evaluator and downward-closed
/// index set, plus error estimation and convergence studies.

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "smolyak/cache.hpp"
#include "smolyak/decomposition.hpp"
#include "smolyak/index_set.hpp"

namespace smolyak {

struct EngineOptions {
  /// Threads used for evaluations. Results do not depend on this value.
  std::size_t threads = 1;
};

template <class V>
struct SmolyakResult {
  V value;
  /// Work of the distinct indices this result needed.
  double total_work = 0.0;
  std::size_t evaluation_count = 0;
  IndexSet index_set;
  std::optional<double> error_estimate;
};

namespace detail {

template <Evaluator E>
void rethrow_with_work(const EvaluationError& e, const EvaluationCache<E>& cache) {
  throw EvaluationError(e.index(), e.detail(), cache.accounted_work());
}

}  // namespace detail

/// Applies a precomputed plan: sum c_i N(i), accumulated in canonical order.
template <Evaluator E>
SmolyakResult<typename E::value_type> smolyak_apply(EvaluationCache<E>& cache, const CombinationPlan& plan,
                                                    const EngineOptions& options = {}) {
  using V = typename E::value_type;
  if (plan.terms.empty()) throw InvalidArgument("smolyak_apply: empty index set");
  const auto indices = plan.indices();
  try {
    cache.prefetch(indices, options.threads);
    std::optional<V> acc;
    double work = 0.0;
    for (const auto& t : plan.terms) {
      const auto& e = cache.get(t.index);
      work += e.work;
      if (!acc) {
        acc = zero_like(e.value);
      }
      ValueTraits<V>::axpy(static_cast<double>(t.coefficient), e.value, *acc);
    }
    return SmolyakResult<V>{std::move(*acc), work, plan.terms.size(), plan.source_set, std::nullopt};
  } catch (const EvaluationError& e) {
    detail::rethrow_with_work(e, cache);
  }
  throw Error("unreachable");
}

/// S_I(N) by the combination rule; indices with zero coefficient are never
/// evaluated.
template <Evaluator E>
SmolyakResult<typename E::value_type> smolyak_apply(EvaluationCache<E>& cache, const IndexSet& set,
                                                    const EngineOptions& options = {}) {
  if (!set.is_downward_closed()) throw InvalidArgument("smolyak_apply requires a downward-closed set");
  return smolyak_apply(cache, combination_coefficients(set), options);
}

template <Evaluator E>
SmolyakResult<typename E::value_type> smolyak_apply(const E& evaluator, const IndexSet& set,
                                                    const EngineOptions& options = {}) {
  EvaluationCache<E> cache(evaluator);
  return smolyak_apply(cache, set, options);
}

/// S_I(N) as the plain sum of mixed differences over I. Evaluates every
/// index of I; serves as an independent check of the combination rule.
template <Evaluator E>
SmolyakResult<typename E::value_type> smolyak_apply_via_differences(EvaluationCache<E>& cache,
                                                                    const IndexSet& set,
                                                                    const EngineOptions& options = {}) {
  using V = typename E::value_type;
  if (!set.is_downward_closed())
    throw InvalidArgument("smolyak_apply_via_differences requires a downward-closed set");
  if (set.empty()) throw InvalidArgument("smolyak_apply_via_differences: empty index set");
  try {
    cache.prefetch(set.members(), options.threads);
    std::optional<V> acc;
    double work = 0.0;
    for (const auto& i : set) {
      work += cache.get(i).work;
      V diff = mixed_difference(cache, i);
      if (!acc)
        acc = std::move(diff);
      else
        ValueTraits<V>::axpy(1.0, diff, *acc);
    }
    return SmolyakResult<V>{std::move(*acc), work, set.size(), set, std::nullopt};
  } catch (const EvaluationError& e) {
    detail::rethrow_with_work(e, cache);
  }
  throw Error("unreachable");
}

template <Evaluator E>
SmolyakResult<typename E::value_type> smolyak_apply_via_differences(const E& evaluator, const IndexSet& set,
                                                                    const EngineOptions& options = {}) {
  EvaluationCache<E> cache(evaluator);
  return smolyak_apply_via_differences(cache, set, options);
}

/// Sum of norm(mixed_difference(N, j)) over the admissible forward neighbors
/// of I: the leading shell of the neglected part of the decomposition.
template <Evaluator E>
double boundary_error_estimate(EvaluationCache<E>& cache, const IndexSet& set,
                               const EngineOptions& options = {}) {
  const auto shell = admissible_forward_neighbors(set);
  std::vector<MultiIndex> needed;
  for (const auto& j : shell)
    for (const auto& t : mixed_difference_stencil(j)) needed.push_back(t.index);
  cache.prefetch(needed, options.threads);
  double estimate = 0.0;
  for (const auto& j : shell) estimate += norm(mixed_difference(cache, j));
  return estimate;
}

struct StudyRow {
  std::size_t set_size = 0;
  /// Cumulative work accounted by the shared cache after this row.
  double work = 0.0;
  double error = 0.0;
  std::optional<double> level;
};

/// Runs S_I(N) for each set, sharing one cache, and reports the error against
/// `reference`. Without a reference the last (richest) set's result is used,
/// which requires the sets to be nested.
template <Evaluator E>
std::vector<StudyRow> convergence_study(EvaluationCache<E>& cache, std::span<const IndexSet> sets,
                                        const std::optional<typename E::value_type>& reference,
                                        std::span<const double> levels = {},
                                        const EngineOptions& options = {}) {
  using V = typename E::value_type;
  if (sets.empty()) return {};
  if (!levels.empty() && levels.size() != sets.size())
    throw InvalidArgument("convergence_study: one level per set expected");
  if (!reference)
    for (std::size_t k = 1; k < sets.size(); ++k)
      if (!sets[k - 1].is_subset_of(sets[k]))
        throw InvalidArgument("convergence_study: sets must be nested when the richest set is the reference");

  std::vector<V> values;
  std::vector<StudyRow> rows;
  for (std::size_t k = 0; k < sets.size(); ++k) {
    auto r = smolyak_apply(cache, sets[k], options);
    values.push_back(std::move(r.value));
    StudyRow row;
    row.set_size = sets[k].size();
    row.work = cache.accounted_work();
    if (!levels.empty()) row.level = levels[k];
    rows.push_back(row);
  }
  const V& ref = reference ? *reference : values.back();
  for (std::size_t k = 0; k < rows.size(); ++k) rows[k].error = norm(subtract(values[k], ref));
  return rows;
}

/// CSV with columns set_size,work,error,L (L empty when not supplied).
inline void write_study_csv(std::ostream& os, std::span<const StudyRow> rows) {
  const auto old_precision = os.precision(17);
  os << "set_size,work,error,L\n";
  for (const auto& r : rows) {
    os << r.set_size << ',' << r.work << ',' << r.error << ',';
    if (r.level) os << *r.level;
    os << '\n';
  }
  os.precision(old_precision);
}

}  // namespace smolyak
