#pragma once

/// \file cache.hpp
/// Memoization of evaluator calls with work accounting.

#include <atomic>
#include <cstddef>
#include <exception>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <utility>
#include <vector>

#include "smolyak/evaluator.hpp"
#include "smolyak/parallel.hpp"

namespace smolyak {

/// Thread-safe map from multi-index to evaluation.
///
/// Each index is charged exactly once to accounted_work(), no matter how
/// often it is requested. Entries are never overwritten. The evaluator must
/// outlive the cache.
template <Evaluator E>
class EvaluationCache {
 public:
  using value_type = typename E::value_type;
  using entry_type = Evaluation<value_type>;

  explicit EvaluationCache(const E& evaluator) : evaluator_(&evaluator) {}

  EvaluationCache(const EvaluationCache&) = delete;
  EvaluationCache& operator=(const EvaluationCache&) = delete;

  const E& evaluator() const { return *evaluator_; }
  Dimension dimension() const { return evaluator_->dimension(); }

  /// Returns the cached evaluation, computing it on a miss. References stay
  /// valid for the lifetime of the cache.
  const entry_type& get(const MultiIndex& i) {
    {
      std::shared_lock lock(mutex_);
      if (auto it = entries_.find(i); it != entries_.end()) {
        hits_.fetch_add(1, std::memory_order_relaxed);
        return it->second;
      }
    }
    entry_type fresh;
    try {
      fresh = evaluator_->evaluate(i);
    } catch (const EvaluationError&) {
      throw;
    } catch (const std::exception& e) {
      throw EvaluationError(i, e.what(), accounted_work());
    }
    if (!(fresh.work > 0))
      throw EvaluationError(i, "evaluator reported nonpositive work", accounted_work());
    std::unique_lock lock(mutex_);
    auto [it, inserted] = entries_.try_emplace(i, std::move(fresh));
    if (inserted) {
      misses_.fetch_add(1, std::memory_order_relaxed);
      work_ += it->second.work;
    } else {
      hits_.fetch_add(1, std::memory_order_relaxed);
    }
    return it->second;
  }

  /// Evaluates every listed index not yet cached, using up to `threads`
  /// threads.
  void prefetch(std::span<const MultiIndex> indices, std::size_t threads) {
    if (threads <= 1) {
      for (const auto& i : indices) get(i);
      return;
    }
    std::vector<MultiIndex> missing;
    {
      std::shared_lock lock(mutex_);
      for (const auto& i : indices)
        if (!entries_.contains(i)) missing.push_back(i);
    }
    parallel_for(missing.size(), threads, [&](std::size_t k) { get(missing[k]); });
  }

  /// Inserts a precomputed evaluation (used when loading a persisted cache).
  /// Rejects a conflicting value for an existing key.
  void insert(const MultiIndex& i, entry_type e) {
    std::unique_lock lock(mutex_);
    auto it = entries_.find(i);
    if (it != entries_.end()) {
      if (!same(it->second, e))
        throw InvalidArgument("cache already holds a different value for " + i.to_string());
      return;
    }
    work_ += e.work;
    entries_.emplace(i, std::move(e));
  }

  bool contains(const MultiIndex& i) const {
    std::shared_lock lock(mutex_);
    return entries_.contains(i);
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
  }

  std::size_t hits() const { return hits_.load(); }
  std::size_t misses() const { return misses_.load(); }

  /// Sum of work over distinct cached indices.
  double accounted_work() const {
    std::shared_lock lock(mutex_);
    return work_;
  }

  /// Snapshot in canonical order.
  std::vector<std::pair<MultiIndex, entry_type>> entries() const {
    std::shared_lock lock(mutex_);
    return {entries_.begin(), entries_.end()};
  }

 private:
  static bool same(const entry_type& a, const entry_type& b) {
    if constexpr (std::equality_comparable<value_type>)
      return a.work == b.work && a.value == b.value;
    else
      return a.work == b.work;
  }

  const E* evaluator_;
  mutable std::shared_mutex mutex_;
  std::map<MultiIndex, entry_type, CanonicalLess> entries_;
  double work_ = 0.0;
  std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> misses_{0};
};

}  // namespace smolyak
