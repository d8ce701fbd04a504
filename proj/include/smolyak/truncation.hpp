#pragma once

/// \file truncation.hpp
/// Profit-based selection of index sets: the knapsack formulation, the
/// Dantzig threshold set, an exhaustive oracle for small boxes and a greedy
/// adaptive builder driven by measured mixed differences.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "smolyak/cache.hpp"
#include "smolyak/decomposition.hpp"
#include "smolyak/engine.hpp"
#include "smolyak/error.hpp"
#include "smolyak/index_set.hpp"

namespace smolyak {

/// Per-dimension decay functions g_j (strictly decreasing) and work
/// functions w_j (nondecreasing) with constants K1, K2:
///   contribution(i) = K1 prod_j g_j(i_j),  work(i) = K2 prod_j w_j(i_j).
class ProfitModel {
 public:
  using Function = std::function<double(MultiIndex::value_type)>;

  ProfitModel(std::vector<Function> decay, std::vector<Function> work, double k1 = 1.0, double k2 = 1.0,
              unsigned checked_prefix = 16)
      : decay_(std::move(decay)), work_(std::move(work)), k1_(k1), k2_(k2) {
    if (decay_.size() != work_.size() || decay_.empty())
      throw InvalidArgument("ProfitModel: need one decay and one work function per dimension");
    if (!(k1_ > 0) || !(k2_ > 0)) throw InvalidArgument("ProfitModel: constants must be positive");
    for (std::size_t j = 0; j < decay_.size(); ++j) {
      double g_prev = 0, w_prev = 0;
      for (unsigned i = 0; i <= checked_prefix; ++i) {
        const double g = decay_[j](i), w = work_[j](i);
        if (!(g > 0) || !(w > 0))
          throw InvalidArgument("ProfitModel: dimension " + std::to_string(j) + " has nonpositive values");
        if (i > 0 && !(g < g_prev))
          throw InvalidArgument("ProfitModel: decay in dimension " + std::to_string(j) +
                                " is not strictly decreasing");
        if (i > 0 && w < w_prev)
          throw InvalidArgument("ProfitModel: work in dimension " + std::to_string(j) + " decreases");
        g_prev = g;
        w_prev = w;
      }
    }
  }

  std::size_t dimension() const { return decay_.size(); }
  double k1() const { return k1_; }
  double k2() const { return k2_; }
  double decay(std::size_t j, MultiIndex::value_type i) const { return decay_[j](i); }
  double work_factor(std::size_t j, MultiIndex::value_type i) const { return work_[j](i); }

  double contribution(const MultiIndex& i) const { return k1_ * product(decay_, i); }
  double work(const MultiIndex& i) const { return k2_ * product(work_, i); }
  /// prod_j g_j(i_j) / w_j(i_j); the constants do not affect rankings.
  double ratio(const MultiIndex& i) const {
    double r = 1.0;
    for (std::size_t j = 0; j < decay_.size(); ++j) r *= decay_[j](i[j]) / work_[j](i[j]);
    return r;
  }

 private:
  double product(const std::vector<Function>& fs, const MultiIndex& i) const {
    if (i.extent() > fs.size())
      throw InvalidArgument("index " + i.to_string() + " outside model dimension " + std::to_string(fs.size()));
    double p = 1.0;
    for (std::size_t j = 0; j < fs.size(); ++j) p *= fs[j](i[j]);
    return p;
  }

  std::vector<Function> decay_;
  std::vector<Function> work_;
  double k1_, k2_;
};

/// K1 sum_{i in I} prod_j g_j(i_j)
inline double set_contribution(const ProfitModel& model, const IndexSet& set) {
  double s = 0.0;
  for (const auto& i : set) s += model.contribution(i);
  return s;
}

/// K2 sum_{i in I} prod_j w_j(i_j)
inline double set_work(const ProfitModel& model, const IndexSet& set) {
  double s = 0.0;
  for (const auto& i : set) s += model.work(i);
  return s;
}

namespace detail {

inline bool fits_budget(double work, double budget) { return work <= budget * (1.0 + 1e-12); }

inline bool same_ratio(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(a, b); }

}  // namespace detail

struct DantzigResult {
  IndexSet set;
  /// Minimal threshold: set = { i : ratio(i) > threshold }.
  double threshold = 0.0;
  double contribution = 0.0;
  double work = 0.0;
};

/// The threshold set { i : g(i)/w(i) > delta } with delta minimal such that
/// its work stays within `budget`.
///
/// Indices are visited in order of decreasing ratio by a best-first search
/// from the origin (the ratio strictly decreases along every coordinate).
/// Indices of equal ratio form one block that is admitted or rejected as a
/// whole; delta is the ratio of the first rejected block.
inline DantzigResult dantzig_set(const ProfitModel& model, double budget, std::size_t index_cap = 1'000'000) {
  const std::size_t d = model.dimension();
  const MultiIndex origin;
  if (!detail::fits_budget(model.work(origin), budget))
    throw InvalidArgument("dantzig_set: budget too small for the origin (work " +
                          std::to_string(model.work(origin)) + " > " + std::to_string(budget) + ")");

  struct Candidate {
    double ratio;
    MultiIndex index;
  };
  auto worse = [](const Candidate& a, const Candidate& b) {
    if (a.ratio != b.ratio) return a.ratio < b.ratio;
    return canonical_compare(a.index, b.index) > 0;
  };
  std::priority_queue<Candidate, std::vector<Candidate>, decltype(worse)> frontier(worse);
  std::set<MultiIndex, CanonicalLess> seen;
  frontier.push({model.ratio(origin), origin});
  seen.insert(origin);

  std::vector<MultiIndex> admitted;
  double used = 0.0;
  double threshold = 0.0;
  while (!frontier.empty()) {
    // Pop one block of (numerically) equal ratio.
    const double block_ratio = frontier.top().ratio;
    std::vector<MultiIndex> block;
    double block_work = 0.0;
    while (!frontier.empty() && detail::same_ratio(frontier.top().ratio, block_ratio)) {
      block.push_back(frontier.top().index);
      block_work += model.work(frontier.top().index);
      frontier.pop();
    }
    if (!detail::fits_budget(used + block_work, budget)) {
      threshold = block_ratio;
      break;
    }
    used += block_work;
    for (auto& i : block) {
      for (std::size_t j = 0; j < d; ++j) {
        MultiIndex next = i.incremented(j);
        if (seen.insert(next).second) frontier.push({model.ratio(next), std::move(next)});
      }
      admitted.push_back(std::move(i));
    }
    if (seen.size() > index_cap)
      throw Error("dantzig_set: threshold search overflow (more than " + std::to_string(index_cap) +
                  " candidate indices)");
  }
  IndexSet set(Dimension::finite(d), std::move(admitted));
  const double contribution = set_contribution(model, set);
  return DantzigResult{std::move(set), threshold, contribution, used};
}

struct KnapsackResult {
  IndexSet set;
  /// Maximal contribution E*(W) over downward-closed subsets of the box.
  double optimum = 0.0;
  double work = 0.0;
};

/// Exhaustive knapsack oracle over the downward-closed subsets of the box
/// {0..bound_0} x ... x {0..bound_{d-1}}. Exponential; limited to `cell_cap`
/// cells.
inline KnapsackResult knapsack_exact(const ProfitModel& model, double budget,
                                     const std::vector<MultiIndex::value_type>& bound,
                                     std::size_t cell_cap = 16) {
  if (bound.size() != model.dimension())
    throw InvalidArgument("knapsack_exact: box dimension does not match the model");
  const IndexSet box = box_set(bound);
  if (box.size() > cell_cap || box.size() >= 63)
    throw InvalidArgument("knapsack_exact: box too large (" + std::to_string(box.size()) + " cells, cap " +
                          std::to_string(cell_cap) + ")");
  const auto cells = box.members();
  const std::size_t n = cells.size();
  std::vector<double> gain(n), cost(n);
  // For each cell, the bitmask of its backward neighbors.
  std::vector<std::uint64_t> needs(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    gain[k] = model.contribution(cells[k]);
    cost[k] = model.work(cells[k]);
    for (const auto& b : backward_neighbors(cells[k])) {
      auto it = std::lower_bound(cells.begin(), cells.end(), b, CanonicalLess{});
      needs[k] |= std::uint64_t{1} << static_cast<std::size_t>(it - cells.begin());
    }
  }
  std::uint64_t best_mask = 0;
  double best_gain = 0.0, best_cost = 0.0;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    double g = 0.0, w = 0.0;
    bool closed = true;
    for (std::size_t k = 0; k < n && closed; ++k)
      if (mask & (std::uint64_t{1} << k)) {
        if ((needs[k] & mask) != needs[k]) closed = false;
        g += gain[k];
        w += cost[k];
      }
    if (!closed || !detail::fits_budget(w, budget)) continue;
    if (g > best_gain || (g == best_gain && w < best_cost)) {
      best_gain = g;
      best_cost = w;
      best_mask = mask;
    }
  }
  std::vector<MultiIndex> chosen;
  for (std::size_t k = 0; k < n; ++k)
    if (best_mask & (std::uint64_t{1} << k)) chosen.push_back(cells[k]);
  return KnapsackResult{IndexSet(Dimension::finite(model.dimension()), std::move(chosen)), best_gain, best_cost};
}

/// Checks |I_W|_g >= (|I_W|_w / W) E*(W) - 1e-12 for the Dantzig set I_W,
/// with E* from the box-restricted exact oracle. Vacuously true when the
/// origin is unaffordable.
inline bool dantzig_guarantee_check(const ProfitModel& model, double budget,
                                    const std::vector<MultiIndex::value_type>& bound, std::size_t cell_cap = 16) {
  const auto exact = knapsack_exact(model, budget, bound, cell_cap);
  if (!detail::fits_budget(model.work(MultiIndex{}), budget)) return true;
  const auto greedy = dantzig_set(model, budget);
  return greedy.contribution >= (greedy.work / budget) * exact.optimum - 1e-12;
}

struct AdaptiveResult {
  IndexSet set;
  /// All work accounted by the cache, including neighbor probes.
  double work_spent = 0.0;
  std::vector<MultiIndex> admission_order;
};

/// Thrown when the evaluator fails during adaptive_build; carries the set
/// built so far.
class AdaptiveBuildError : public EvaluationError {
 public:
  AdaptiveBuildError(const EvaluationError& cause, IndexSet partial)
      : EvaluationError(cause.index(), cause.detail(), cause.work_spent()), partial_(std::move(partial)) {}
  const IndexSet& partial_set() const { return partial_; }

 private:
  IndexSet partial_;
};

/// Greedy construction of a downward-closed set.
///
/// Starting from {origin}, each round probes every admissible forward
/// neighbor j, computing norm(mixed_difference(N, j)) / work(stencil of j),
/// and admits the largest profit (ties: canonical order). Stops when the
/// accumulated work exceeds the budget after a probe round, or when every
/// profit is zero. Every admitted index was evaluated within budget.
template <Evaluator E>
AdaptiveResult adaptive_build(EvaluationCache<E>& cache, double budget, const EngineOptions& options = {},
                              std::size_t max_rounds = 100'000) {
  const Dimension dim = cache.dimension();
  const MultiIndex origin;
  IndexSet current(dim, {origin});
  std::vector<MultiIndex> order{origin};
  try {
    cache.get(origin);
    if (!detail::fits_budget(cache.accounted_work(), budget))
      throw InvalidArgument("adaptive_build: budget does not afford the origin");
    for (std::size_t round = 0; round < max_rounds; ++round) {
      const auto shell = admissible_forward_neighbors(current);
      std::vector<MultiIndex> needed;
      for (const auto& j : shell)
        for (const auto& t : mixed_difference_stencil(j)) needed.push_back(t.index);
      cache.prefetch(needed, options.threads);
      if (!detail::fits_budget(cache.accounted_work(), budget)) break;

      std::optional<std::size_t> best;
      double best_profit = 0.0;
      for (std::size_t k = 0; k < shell.size(); ++k) {
        const double profit = norm(mixed_difference(cache, shell[k])) / mixed_difference_work(cache, shell[k]);
        if (profit > best_profit) {
          best_profit = profit;
          best = k;
        }
      }
      if (!best) break;
      current = current.with(shell[*best]);
      order.push_back(shell[*best]);
    }
  } catch (const EvaluationError& e) {
    throw AdaptiveBuildError(EvaluationError(e.index(), e.detail(), cache.accounted_work()), current);
  }
  return AdaptiveResult{std::move(current), cache.accounted_work(), std::move(order)};
}

}  // namespace smolyak
