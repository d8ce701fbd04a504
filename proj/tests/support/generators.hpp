#pragma once

// Hand-rolled random generators for property tests. Every generator is
// driven by an explicit std::mt19937_64 so failures replay from the seed.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <vector>

#include "smolyak/smolyak.hpp"

namespace testgen {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline smolyak::MultiIndex random_index(Rng& rng, std::size_t d, unsigned max_value) {
  std::vector<smolyak::MultiIndex::value_type> v(d);
  for (auto& x : v) x = static_cast<unsigned>(pick(rng, 0, max_value));
  return smolyak::MultiIndex::from_dense(v);
}

/// Downward closure of a few random seeds, trimmed to at most `max_size`
/// members by growing from the origin through admissible neighbors.
inline smolyak::IndexSet random_downward_closed(Rng& rng, std::size_t d, unsigned max_value, std::size_t max_size) {
  using smolyak::IndexSet;
  IndexSet set(smolyak::Dimension::finite(d), {smolyak::MultiIndex{}});
  const std::size_t target = pick(rng, 1, max_size);
  while (set.size() < target) {
    auto frontier = smolyak::admissible_forward_neighbors(set);
    std::erase_if(frontier, [&](const smolyak::MultiIndex& j) {
      for (const auto& e : j.entries())
        if (e.value > max_value) return true;
      return false;
    });
    if (frontier.empty()) break;
    set = set.with(frontier[pick(rng, 0, frontier.size() - 1)]);
  }
  return set;
}

/// Arbitrary finite set (not necessarily downward closed).
inline smolyak::IndexSet random_set(Rng& rng, std::size_t d, unsigned max_value, std::size_t max_size) {
  std::vector<smolyak::MultiIndex> members;
  const std::size_t n = pick(rng, 1, max_size);
  for (std::size_t k = 0; k < n; ++k) members.push_back(random_index(rng, d, max_value));
  return smolyak::IndexSet(smolyak::Dimension::finite(d), std::move(members));
}

/// Evaluator with i.i.d. uniform [-1,1] values per index, drawn lazily from a
/// per-index seed so values do not depend on the query order.
class RandomEvaluator {
 public:
  using value_type = double;

  RandomEvaluator(std::size_t d, std::uint64_t seed) : d_(d), seed_(seed) {}

  smolyak::Dimension dimension() const { return smolyak::Dimension::finite(d_); }

  smolyak::Evaluation<double> evaluate(const smolyak::MultiIndex& i) const {
    std::vector<std::uint32_t> key{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
    for (const auto& e : i.entries()) {
      key.push_back(static_cast<std::uint32_t>(e.dim));
      key.push_back(e.value);
    }
    std::seed_seq seq(key.begin(), key.end());
    Rng rng(seq);
    return {uniform(rng, -1.0, 1.0), 1.0 + static_cast<double>(i.l1())};
  }

 private:
  std::size_t d_;
  std::uint64_t seed_;
};

/// Random exponential-decay model: g_j(i) = exp(-c_j i), w_j(i) = exp(w_j i).
inline smolyak::ExpPolyModel random_exp_model(Rng& rng, std::size_t d) {
  std::vector<double> c(d), w(d);
  for (std::size_t j = 0; j < d; ++j) {
    c[j] = uniform(rng, 0.3, 2.0);
    w[j] = uniform(rng, 0.3, 2.0);
  }
  return smolyak::ExpPolyModel::from_rates(c, w);
}

}  // namespace testgen
