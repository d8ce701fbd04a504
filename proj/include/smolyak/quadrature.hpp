#pragma once

/// \file quadrature.hpp
/// Sparse-grid quadrature on [0,1]^d by the combination technique, built on
/// nested closed trapezoid rules.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "smolyak/decomposition.hpp"
#include "smolyak/engine.hpp"
#include "smolyak/error.hpp"
#include "smolyak/evaluator.hpp"
#include "smolyak/index_set.hpp"

namespace smolyak {

struct UnivariateRule {
  unsigned level = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
  bool nested = true;
};

inline constexpr unsigned kMaxRuleLevel = 30;

/// Closed composite trapezoid rule with 2^level + 1 nodes on [0,1].
inline UnivariateRule trapezoid_rule(unsigned level) {
  if (level > kMaxRuleLevel) throw InvalidArgument("trapezoid_rule: level too large");
  const std::size_t cells = std::size_t{1} << level;
  const double h = std::ldexp(1.0, -static_cast<int>(level));
  UnivariateRule r{level, {}, {}, true};
  for (std::size_t k = 0; k <= cells; ++k) {
    r.nodes.push_back(static_cast<double>(k) * h);
    r.weights.push_back((k == 0 || k == cells) ? h / 2 : h);
  }
  return r;
}

using Integrand = std::function<double(std::span<const double>)>;

namespace detail {

inline std::uint64_t tensor_node_count(const MultiIndex& i, std::size_t d) {
  std::uint64_t n = 1;
  for (std::size_t j = 0; j < d; ++j) n *= (std::uint64_t{1} << i[j]) + 1;
  return n;
}

// Visits every node of the tensor grid of level i, with its tensor weight,
// in lexicographic node order.
template <class Visit>
void for_each_tensor_node(const MultiIndex& i, std::size_t d, Visit&& visit) {
  std::vector<UnivariateRule> rules;
  for (std::size_t j = 0; j < d; ++j) {
    if (i[j] > kMaxRuleLevel) throw InvalidArgument("tensor grid level too large: " + i.to_string());
    rules.push_back(trapezoid_rule(i[j]));
  }
  std::vector<std::size_t> pos(d, 0);
  std::vector<double> x(d);
  while (true) {
    double w = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      x[j] = rules[j].nodes[pos[j]];
      w *= rules[j].weights[pos[j]];
    }
    visit(std::span<const double>(x), w);
    std::size_t j = d;
    while (j > 0) {
      --j;
      if (++pos[j] < rules[j].nodes.size()) break;
      pos[j] = 0;
      if (j == 0) return;
    }
    if (d == 0) return;
  }
}

}  // namespace detail

/// Full tensor trapezoid rule of level i; work is the node count
/// prod_j (2^{i_j} + 1).
inline Evaluation<double> tensor_quadrature(const Integrand& f, std::size_t d, const MultiIndex& i) {
  if (!i.fits(Dimension::finite(d))) throw InvalidArgument("tensor_quadrature: index outside dimension");
  double sum = 0.0;
  detail::for_each_tensor_node(i, d, [&](std::span<const double> x, double w) { sum += w * f(x); });
  return {sum, static_cast<double>(detail::tensor_node_count(i, d))};
}

/// Evaluator i -> tensor_quadrature(f, i). Integrand values are memoized by
/// node so that distinct_evaluations() counts what a merged sparse grid
/// actually pays.
class TensorQuadratureEvaluator {
 public:
  using value_type = double;

  TensorQuadratureEvaluator(Integrand f, std::size_t d)
      : f_(std::move(f)), d_(d), memo_(std::make_shared<Memo>()) {
    if (d == 0) throw InvalidArgument("TensorQuadratureEvaluator: d must be at least 1");
  }

  Dimension dimension() const { return Dimension::finite(d_); }

  Evaluation<double> evaluate(const MultiIndex& i) const {
    if (!i.fits(dimension())) throw InvalidArgument("index " + i.to_string() + " outside dimension");
    double sum = 0.0;
    detail::for_each_tensor_node(i, d_, [&](std::span<const double> x, double w) { sum += w * value_at(x); });
    return {sum, static_cast<double>(detail::tensor_node_count(i, d_))};
  }

  std::size_t distinct_evaluations() const {
    std::lock_guard lock(memo_->mutex);
    return memo_->values.size();
  }

 private:
  struct Memo {
    std::mutex mutex;
    std::map<std::vector<double>, double> values;
  };

  double value_at(std::span<const double> x) const {
    std::vector<double> key(x.begin(), x.end());
    {
      std::lock_guard lock(memo_->mutex);
      if (auto it = memo_->values.find(key); it != memo_->values.end()) return it->second;
    }
    const double v = f_(x);
    std::lock_guard lock(memo_->mutex);
    memo_->values.emplace(std::move(key), v);
    return v;
  }

  Integrand f_;
  std::size_t d_;
  std::shared_ptr<Memo> memo_;
};

/// Sparse quadrature S_I applied to f. total_work is the number of distinct
/// integrand evaluations over the merged grids.
inline SmolyakResult<double> sparse_quadrature(const Integrand& f, std::size_t d, const IndexSet& set,
                                               const EngineOptions& options = {}) {
  TensorQuadratureEvaluator eval(f, d);
  EvaluationCache cache(eval);
  auto result = smolyak_apply(cache, set, options);
  result.total_work = static_cast<double>(eval.distinct_evaluations());
  return result;
}

struct GridNode {
  std::vector<double> point;
  double weight = 0.0;
};

struct SparseQuadratureGrid {
  /// Merged nodes in lexicographic order, |weight| >= 1e-15.
  std::vector<GridNode> nodes;
  /// Number of distinct nodes in the union before dropping zero weights.
  std::size_t union_size = 0;

  double weight_sum() const {
    double s = 0.0;
    for (const auto& n : nodes) s += n.weight;
    return s;
  }

  double integrate(const Integrand& f) const {
    double s = 0.0;
    for (const auto& n : nodes) s += n.weight * f(n.point);
    return s;
  }
};

/// Merges the tensor grids of the combination plan of I, accumulating
/// c_i * tensor weight per node.
inline SparseQuadratureGrid sparse_grid_nodes(const IndexSet& set) {
  if (!set.dimension().is_finite()) throw InvalidArgument("sparse_grid_nodes: finite dimension required");
  const std::size_t d = set.dimension().size();
  const auto plan = combination_coefficients(set);
  std::map<std::vector<double>, double> merged;
  for (const auto& t : plan.terms)
    detail::for_each_tensor_node(t.index, d, [&](std::span<const double> x, double w) {
      merged[std::vector<double>(x.begin(), x.end())] += static_cast<double>(t.coefficient) * w;
    });
  SparseQuadratureGrid grid;
  grid.union_size = merged.size();
  for (auto& [x, w] : merged)
    if (std::abs(w) >= 1e-15) grid.nodes.push_back({x, w});
  return grid;
}

struct IntegrandSpec {
  std::string id;
  Integrand f;
  /// Exact integral over [0,1]^d.
  double exact = 0.0;
};

/// Built-in test integrands: exp-sum exp(x_1+...+x_d), runge-product
/// prod 1/(1+25(x_j-1/2)^2), polynomial prod (1 + x_j + x_j^2).
inline IntegrandSpec make_integrand(const std::string& id, std::size_t d) {
  if (d == 0) throw InvalidArgument("make_integrand: d must be at least 1");
  const double dd = static_cast<double>(d);
  if (id == "exp-sum")
    return {id,
            [](std::span<const double> x) {
              double s = 0.0;
              for (double v : x) s += v;
              return std::exp(s);
            },
            std::pow(std::numbers::e - 1.0, dd)};
  if (id == "runge-product")
    return {id,
            [](std::span<const double> x) {
              double p = 1.0;
              for (double v : x) p /= 1.0 + 25.0 * (v - 0.5) * (v - 0.5);
              return p;
            },
            std::pow(0.4 * std::atan(2.5), dd)};
  if (id == "polynomial")
    return {id,
            [](std::span<const double> x) {
              double p = 1.0;
              for (double v : x) p *= 1.0 + v + v * v;
              return p;
            },
            std::pow(11.0 / 6.0, dd)};
  throw InvalidArgument("unknown integrand '" + id + "' (expected exp-sum, runge-product or polynomial)");
}

inline const std::vector<std::string>& integrand_ids() {
  static const std::vector<std::string> ids = {"exp-sum", "runge-product", "polynomial"};
  return ids;
}

/// Approximant sequence r_k on [0,1].
using Approximants = std::function<double(unsigned k, double x)>;

/// N(i, k) = S_i r_k: univariate trapezoid rule of level i applied to the
/// k-th approximant.
class BilinearEvaluator {
 public:
  using value_type = double;

  explicit BilinearEvaluator(Approximants r) : r_(std::move(r)) {}

  Dimension dimension() const { return Dimension::finite(2); }

  Evaluation<double> evaluate(const MultiIndex& i) const {
    if (!i.fits(dimension())) throw InvalidArgument("index " + i.to_string() + " outside dimension");
    const auto rule = trapezoid_rule(i[0]);
    const unsigned k = i[1];
    double s = 0.0;
    for (std::size_t n = 0; n < rule.nodes.size(); ++n) s += rule.weights[n] * r_(k, rule.nodes[n]);
    return {s, static_cast<double>(rule.nodes.size()) * (k + 1.0)};
  }

 private:
  Approximants r_;
};

/// Truncated exponential series r_k(x) = sum_{m<=k} x^m / m!.
inline double exp_taylor(unsigned k, double x) {
  double term = 1.0, s = 1.0;
  for (unsigned m = 1; m <= k; ++m) {
    term *= x / m;
    s += term;
  }
  return s;
}

inline SmolyakResult<double> bilinear_multilevel_demo(const Approximants& r, const IndexSet& set,
                                                      const EngineOptions& options = {}) {
  BilinearEvaluator eval(r);
  return smolyak_apply(eval, set, options);
}

}  // namespace smolyak
