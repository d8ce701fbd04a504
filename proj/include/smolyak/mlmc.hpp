#pragma once

/// \file mlmc.hpp
/// Multilevel Monte Carlo for scalar SDEs as Smolyak's algorithm in the two
/// parameters (samples k, time steps l).

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "smolyak/engine.hpp"
#include "smolyak/error.hpp"
#include "smolyak/evaluator.hpp"
#include "smolyak/index_set.hpp"
#include "smolyak/parallel.hpp"
#include "smolyak/random.hpp"

namespace smolyak {

/// dS = a(t,S) dt + b(t,S) dW on [0,T], S(0) = s0; quantity Q(S(T)).
struct SdeProblem {
  std::function<double(double, double)> drift;
  std::function<double(double, double)> diffusion;
  double s0 = 1.0;
  double horizon = 1.0;
  std::function<double(double)> quantity = [](double s) { return s; };
  std::optional<double> reference_value;
};

/// Geometric Brownian motion with Q(s) = s; E[S(T)] = s0 exp(a T).
inline SdeProblem gbm(double a, double b, double s0 = 1.0, double horizon = 1.0) {
  if (!(horizon > 0)) throw InvalidArgument("gbm: horizon must be positive");
  return {[a](double, double s) { return a * s; }, [b](double, double s) { return b * s; }, s0, horizon,
          [](double s) { return s; }, s0 * std::exp(a * horizon)};
}

struct MlmcParams {
  std::uint64_t m0 = 100;
  std::uint64_t n0 = 1;
  std::uint64_t seed = 1;

  /// M_k = ceil(M0 exp(2k/3))
  std::uint64_t sample_count(unsigned k) const { return grow(m0, k); }
  /// N_l = ceil(N0 exp(2l/3))
  std::uint64_t step_count(unsigned l) const { return grow(n0, l); }

  void validate() const {
    if (m0 == 0 || n0 == 0) throw InvalidArgument("MlmcParams: M0 and N0 must be positive");
  }

 private:
  static std::uint64_t grow(std::uint64_t base, unsigned level) {
    const double x = static_cast<double>(base) * std::exp(2.0 * level / 3.0);
    if (!(x < 4e15)) throw InvalidArgument("MlmcParams: level too large");
    return static_cast<std::uint64_t>(std::ceil(x));
  }
};

/// Explicit Euler solution S_N(T) driven by the given Brownian increments.
inline double euler_path(const SdeProblem& problem, std::span<const double> increments) {
  const std::size_t n = increments.size();
  if (n == 0) throw InvalidArgument("euler_path: at least one step required");
  const double dt = problem.horizon / static_cast<double>(n);
  double s = problem.s0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = problem.horizon * static_cast<double>(k) / static_cast<double>(n);
    s += problem.drift(t, s) * dt + problem.diffusion(t, s) * increments[k];
  }
  return s;
}

inline double euler_path(const SdeProblem& problem, std::size_t steps, std::span<const double> increments) {
  if (increments.size() != steps)
    throw InvalidArgument("euler_path: expected " + std::to_string(steps) + " increments, got " +
                          std::to_string(increments.size()));
  return euler_path(problem, increments);
}

/// One Brownian path sampled on the union of a fine grid (n_fine steps) and
/// a coarse grid (n_coarse steps), with both grids' increments obtained by
/// aggregating the union increments.
struct CoupledIncrements {
  std::vector<double> union_increments;
  /// Union breakpoints as numerators over n_fine * n_coarse.
  std::vector<std::uint64_t> union_points;
  std::vector<double> fine;
  std::vector<double> coarse;
};

inline CoupledIncrements coupled_increments(double horizon, std::uint64_t n_fine, std::uint64_t n_coarse,
                                            NormalStream& stream) {
  if (n_fine == 0 || n_coarse == 0) throw InvalidArgument("coupled_increments: step counts must be positive");
  const std::uint64_t denom = n_fine * n_coarse;
  CoupledIncrements out;
  out.fine.assign(n_fine, 0.0);
  out.coarse.assign(n_coarse, 0.0);
  out.union_points.push_back(0);
  std::uint64_t kf = 1, kc = 1;
  while (kf <= n_fine || kc <= n_coarse) {
    const std::uint64_t pf = kf <= n_fine ? kf * n_coarse : denom + 1;
    const std::uint64_t pc = kc <= n_coarse ? kc * n_fine : denom + 1;
    const std::uint64_t p = std::min(pf, pc);
    const double dt = horizon * static_cast<double>(p - out.union_points.back()) / static_cast<double>(denom);
    const double dw = std::sqrt(dt) * stream.next();
    out.union_increments.push_back(dw);
    out.fine[kf - 1] += dw;
    out.coarse[kc - 1] += dw;
    out.union_points.push_back(p);
    if (pf == p) ++kf;
    if (pc == p) ++kc;
  }
  return out;
}

/// (fine, coarse) Euler solutions on one shared path.
inline std::pair<double, double> coupled_sample(const SdeProblem& problem, std::uint64_t n_fine,
                                                std::uint64_t n_coarse, NormalStream& stream) {
  const auto inc = coupled_increments(problem.horizon, n_fine, n_coarse, stream);
  return {euler_path(problem, inc.fine), euler_path(problem, inc.coarse)};
}

namespace detail {

inline constexpr std::uint32_t kLevelDomain = 0;
inline constexpr std::uint32_t kBaselineDomain = 1;

inline NormalStream level_stream(std::uint64_t seed, unsigned l, std::uint64_t sample_id) {
  if (sample_id > 0xFFFFFFFFull) throw InvalidArgument("sample id exceeds stream capacity");
  return NormalStream(seed, kLevelDomain, l, static_cast<std::uint32_t>(sample_id));
}

}  // namespace detail

/// Sample `sample_id` of level l >= 1: Euler solutions with N_l and N_{l-1}
/// steps on one path from the stream keyed by (seed, l, sample_id).
inline std::pair<double, double> coupled_level_sample(const SdeProblem& problem, unsigned l,
                                                      const MlmcParams& params, std::uint64_t sample_id) {
  if (l == 0) throw InvalidArgument("coupled_level_sample: level must be at least 1");
  auto stream = detail::level_stream(params.seed, l, sample_id);
  return coupled_sample(problem, params.step_count(l), params.step_count(l - 1), stream);
}

/// D_0 = Q(S_{N_0}(T)); D_l = Q(fine) - Q(coarse) for l >= 1.
inline double level_difference(const SdeProblem& problem, unsigned l, const MlmcParams& params,
                               std::uint64_t sample_id) {
  if (l == 0) {
    auto stream = detail::level_stream(params.seed, 0, sample_id);
    const std::uint64_t n = params.step_count(0);
    std::vector<double> dw(n);
    const double sd = std::sqrt(problem.horizon / static_cast<double>(n));
    for (auto& x : dw) x = sd * stream.next();
    return problem.quantity(euler_path(problem, dw));
  }
  const auto [fine, coarse] = coupled_level_sample(problem, l, params, sample_id);
  return problem.quantity(fine) - problem.quantity(coarse);
}

/// N(k, l) = sum_{l' <= l} (1/M_k) sum_{i < M_k} D_{l'}(i), i.e. the
/// Monte Carlo estimate with M_k samples at N_l steps written as a
/// telescoping sum over independent coupled level streams. Sample i of group
/// l' is the same for every k. Work is M_k N_l.
class MlmcEvaluator {
 public:
  using value_type = double;

  MlmcEvaluator(SdeProblem problem, MlmcParams params, std::size_t threads = 1)
      : problem_(std::move(problem)), params_(params), threads_(threads), state_(std::make_shared<State>()) {
    params_.validate();
  }

  Dimension dimension() const { return Dimension::finite(2); }
  const MlmcParams& params() const { return params_; }

  Evaluation<double> evaluate(const MultiIndex& i) const {
    if (!i.fits(dimension())) throw InvalidArgument("index " + i.to_string() + " outside dimension");
    const unsigned k = i[0], l = i[1];
    const std::uint64_t m = params_.sample_count(k);
    double value = 0.0;
    for (unsigned g = 0; g <= l; ++g) value += prefix_sum(g, m) / static_cast<double>(m);
    return {value, static_cast<double>(m) * static_cast<double>(params_.step_count(l))};
  }

 private:
  struct State {
    std::mutex mutex;
    std::vector<std::vector<double>> prefix;  // prefix[g][n] = sum_{i<n} D_g(i)
  };

  double prefix_sum(unsigned g, std::uint64_t m) const {
    std::lock_guard lock(state_->mutex);
    auto& pre = state_->prefix;
    if (pre.size() <= g) pre.resize(g + 1, std::vector<double>{0.0});
    auto& p = pre[g];
    if (p.size() <= m) {
      const std::uint64_t have = p.size() - 1;
      std::vector<double> fresh(m - have);
      parallel_for(fresh.size(), threads_,
                   [&](std::size_t n) { fresh[n] = level_difference(problem_, g, params_, have + n); });
      for (double x : fresh) p.push_back(p.back() + x);
    }
    return p[m];
  }

  SdeProblem problem_;
  MlmcParams params_;
  std::size_t threads_;
  std::shared_ptr<State> state_;
};

/// S_L(N) over the triangle {k + l <= L}.
inline SmolyakResult<double> smolyak_triangle_estimate(const SdeProblem& problem, const MlmcParams& params,
                                                       unsigned level, std::size_t threads = 1) {
  MlmcEvaluator eval(problem, params, threads);
  return smolyak_apply(eval, simplex_set(2, level), EngineOptions{threads});
}

/// (1/M_L) sum Q(S_{N_0}) + sum_{l=1}^{L} (1/M_{L-l}) sum (Q(S_{N_l}) - Q(S_{N_{l-1}})),
/// computed directly from the level streams.
inline double multilevel_telescoping_estimate(const SdeProblem& problem, const MlmcParams& params,
                                              unsigned level, std::size_t threads = 1) {
  params.validate();
  double total = 0.0;
  for (unsigned l = 0; l <= level; ++l) {
    const std::uint64_t m = params.sample_count(level - l);
    std::vector<double> d(m);
    parallel_for(m, threads, [&](std::size_t i) { d[i] = level_difference(problem, l, params, i); });
    double s = 0.0;
    for (double x : d) s += x;
    total += s / static_cast<double>(m);
  }
  return total;
}

/// Single-level Monte Carlo with M samples and N steps from its own streams.
inline double single_level_estimate(const SdeProblem& problem, std::uint64_t samples, std::uint64_t steps,
                                    std::uint64_t seed, std::size_t threads = 1) {
  if (samples == 0 || steps == 0) throw InvalidArgument("single_level_estimate: counts must be positive");
  if (samples > 0xFFFFFFFFull) throw InvalidArgument("single_level_estimate: too many samples");
  std::vector<double> q(samples);
  const double sd = std::sqrt(problem.horizon / static_cast<double>(steps));
  parallel_for(samples, threads, [&](std::size_t i) {
    NormalStream stream(seed, detail::kBaselineDomain, 0, static_cast<std::uint32_t>(i));
    std::vector<double> dw(steps);
    for (auto& x : dw) x = sd * stream.next();
    q[i] = problem.quantity(euler_path(problem, dw));
  });
  double s = 0.0;
  for (double x : q) s += x;
  return s / static_cast<double>(samples);
}

struct MseRow {
  unsigned level = 0;
  double rmse = 0.0;
  double work = 0.0;
  double baseline_rmse = 0.0;
  double baseline_work = 0.0;
};

/// Per level L: RMSE of S_L over R replications (seeds derived from the
/// master seed) and its work, next to single-level Monte Carlo with
/// M = ceil(M0 exp(2L/3)) samples and N = ceil(N0 exp(L/3)) steps.
inline std::vector<MseRow> mse_work_study(const SdeProblem& problem, const MlmcParams& params,
                                          std::span<const unsigned> levels, unsigned replications,
                                          std::size_t threads = 1) {
  if (!problem.reference_value) throw InvalidArgument("mse_work_study: problem needs a reference value");
  if (replications < 10) throw InvalidArgument("mse_work_study: at least ten replications required");
  params.validate();
  const double ref = *problem.reference_value;
  std::vector<MseRow> rows;
  for (unsigned L : levels) {
    MseRow row;
    row.level = L;
    const auto m = static_cast<std::uint64_t>(std::ceil(static_cast<double>(params.m0) * std::exp(2.0 * L / 3.0)));
    const auto n = static_cast<std::uint64_t>(std::ceil(static_cast<double>(params.n0) * std::exp(L / 3.0)));
    double se = 0.0, se_base = 0.0;
    for (unsigned r = 0; r < replications; ++r) {
      MlmcParams p = params;
      p.seed = derive_seed(params.seed, r);
      const auto est = smolyak_triangle_estimate(problem, p, L, threads);
      se += (est.value - ref) * (est.value - ref);
      row.work = est.total_work;
      const double base = single_level_estimate(problem, m, n, p.seed, threads);
      se_base += (base - ref) * (base - ref);
    }
    row.rmse = std::sqrt(se / replications);
    row.baseline_rmse = std::sqrt(se_base / replications);
    row.baseline_work = static_cast<double>(m) * static_cast<double>(n);
    rows.push_back(row);
  }
  return rows;
}

inline void write_mse_csv(std::ostream& os, std::span<const MseRow> rows) {
  const auto old_precision = os.precision(17);
  os << "L,rmse,work,baseline_rmse,baseline_work\n";
  for (const auto& r : rows)
    os << r.level << ',' << r.rmse << ',' << r.work << ',' << r.baseline_rmse << ',' << r.baseline_work << '\n';
  os.precision(old_precision);
}

struct LevelVarianceRow {
  unsigned level = 0;
  std::uint64_t steps = 0;
  double mean = 0.0;
  double variance = 0.0;
};

/// Sample mean and variance of D_l for each l >= 1.
inline std::vector<LevelVarianceRow> level_variance_study(const SdeProblem& problem, const MlmcParams& params,
                                                          std::span<const unsigned> levels,
                                                          std::uint64_t samples, std::size_t threads = 1) {
  if (samples < 2) throw InvalidArgument("level_variance_study: at least two samples required");
  params.validate();
  std::vector<LevelVarianceRow> rows;
  for (unsigned l : levels) {
    if (l == 0) throw InvalidArgument("level_variance_study: levels must be at least 1");
    std::vector<double> d(samples);
    parallel_for(samples, threads, [&](std::size_t i) { d[i] = level_difference(problem, l, params, i); });
    double mean = 0.0;
    for (double x : d) mean += x;
    mean /= static_cast<double>(samples);
    double var = 0.0;
    for (double x : d) var += (x - mean) * (x - mean);
    var /= static_cast<double>(samples - 1);
    rows.push_back({l, params.step_count(l), mean, var});
  }
  return rows;
}

}  // namespace smolyak
