#pragma once

/// \file models.hpp
/// Exponential-with-polynomial decay and work models, the rate quantities
/// they induce, predicted work/error shapes and numerical checks of the
/// exponential-sum bounds behind them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "smolyak/error.hpp"
#include "smolyak/index_set.hpp"
#include "smolyak/truncation.hpp"

namespace smolyak {

/// Per-direction parameters. Decay bound K1 exp(-c i)(i+1)^gc, work bound
/// K2 exp(w i)(i+1)^gw.
struct Direction {
  double decay_constant = 1.0;  // K1_j
  double decay_rate = 1.0;      // c_j
  double decay_degree = 0.0;    // gc_j
  double work_constant = 1.0;   // K2_j
  double work_rate = 1.0;       // w_j
  double work_degree = 0.0;     // gw_j
};

class ExpPolyModel {
 public:
  explicit ExpPolyModel(std::vector<Direction> directions) : dirs_(std::move(directions)) {
    if (dirs_.empty()) throw InvalidArgument("ExpPolyModel: at least one direction required");
    for (std::size_t j = 0; j < dirs_.size(); ++j) {
      const auto& d = dirs_[j];
      if (!(d.decay_rate > 0) || !(d.work_rate > 0))
        throw InvalidArgument("ExpPolyModel: rates must be positive (direction " + std::to_string(j) + ")");
      if (!(d.decay_degree >= 0) || !(d.work_degree >= 0))
        throw InvalidArgument("ExpPolyModel: polynomial degrees must be nonnegative (direction " +
                              std::to_string(j) + ")");
      if (!(d.decay_constant > 0) || !(d.work_constant > 0))
        throw InvalidArgument("ExpPolyModel: constants must be positive (direction " + std::to_string(j) + ")");
    }
  }

  /// Convenience: rates only, unit constants, optional degrees.
  static ExpPolyModel from_rates(const std::vector<double>& c, const std::vector<double>& w,
                                 const std::vector<double>& gc = {}, const std::vector<double>& gw = {}) {
    if (c.size() != w.size() || (!gc.empty() && gc.size() != c.size()) || (!gw.empty() && gw.size() != c.size()))
      throw InvalidArgument("ExpPolyModel: parameter vectors differ in length");
    std::vector<Direction> dirs(c.size());
    for (std::size_t j = 0; j < c.size(); ++j) {
      dirs[j].decay_rate = c[j];
      dirs[j].work_rate = w[j];
      if (!gc.empty()) dirs[j].decay_degree = gc[j];
      if (!gw.empty()) dirs[j].work_degree = gw[j];
    }
    return ExpPolyModel(std::move(dirs));
  }

  std::size_t dimension() const { return dirs_.size(); }
  const std::vector<Direction>& directions() const { return dirs_; }
  const Direction& operator[](std::size_t j) const { return dirs_[j]; }

  /// K1 = prod_j K1_j
  double k1() const {
    double p = 1.0;
    for (const auto& d : dirs_) p *= d.decay_constant;
    return p;
  }
  /// K2 = prod_j K2_j
  double k2() const {
    double p = 1.0;
    for (const auto& d : dirs_) p *= d.work_constant;
    return p;
  }

  /// Level-set weights c_j + w_j.
  std::vector<double> level_weights() const {
    std::vector<double> wts;
    for (const auto& d : dirs_) wts.push_back(d.decay_rate + d.work_rate);
    return wts;
  }

  /// The induced profit model, with the per-direction constants folded into
  /// g_j and w_j and K1 = K2 = 1.
  ProfitModel profit_model() const {
    std::vector<ProfitModel::Function> g, w;
    for (const auto& d : dirs_) {
      g.emplace_back([d](MultiIndex::value_type i) {
        return d.decay_constant * std::exp(-d.decay_rate * i) * std::pow(i + 1.0, d.decay_degree);
      });
      w.emplace_back([d](MultiIndex::value_type i) {
        return d.work_constant * std::exp(d.work_rate * i) * std::pow(i + 1.0, d.work_degree);
      });
    }
    return ProfitModel(std::move(g), std::move(w));
  }

 private:
  std::vector<Direction> dirs_;
};

struct RateSummary {
  double rho = 0.0;  // max_j w_j / c_j
  double mu = 0.0;   // rho / (1 + rho), work exponent per unit level
  double nu = 0.0;   // 1 / (1 + rho), error exponent per unit level
  std::vector<std::size_t> argmax;  // J
  std::size_t d_star = 0;           // |J|
  double decay_degree_star = 0.0;   // sum_{j in J} gc_j
  double work_degree_star = 0.0;    // sum_{j in J} gw_j
};

inline RateSummary rate_summary(const ExpPolyModel& model) {
  RateSummary s;
  for (const auto& d : model.directions()) s.rho = std::max(s.rho, d.work_rate / d.decay_rate);
  s.mu = s.rho / (1.0 + s.rho);
  s.nu = 1.0 - s.mu;
  for (std::size_t j = 0; j < model.dimension(); ++j) {
    const auto& d = model[j];
    if (std::abs(d.work_rate / d.decay_rate - s.rho) <= 1e-12 * s.rho) {
      s.argmax.push_back(j);
      s.decay_degree_star += d.decay_degree;
      s.work_degree_star += d.work_degree;
    }
  }
  s.d_star = s.argmax.size();
  return s;
}

/// I_L = { i : sum_j (c_j + w_j) i_j <= L }
inline IndexSet level_set_for_model(const ExpPolyModel& model, double level) {
  return weighted_level_set(model.level_weights(), level);
}

struct PredictedBounds {
  double work = 0.0;
  double error = 0.0;
};

/// Shapes of the work and error bounds of Smolyak's algorithm on I_L, with
/// the unknown proof constants set to 1:
///   work  K2 exp(mu L)(L+1)^{d*-1+gw*},  error  K1 exp(-nu L)(L+1)^{d*-1+gc*}.
inline PredictedBounds predicted_bounds(const ExpPolyModel& model, double level) {
  if (!(level >= 0)) throw InvalidArgument("predicted_bounds: level must be nonnegative");
  const auto s = rate_summary(model);
  const double base = static_cast<double>(s.d_star) - 1.0;
  return {model.k2() * std::exp(s.mu * level) * std::pow(level + 1.0, base + s.work_degree_star),
          model.k1() * std::exp(-s.nu * level) * std::pow(level + 1.0, base + s.decay_degree_star)};
}

/// Work needed for accuracy eps, constants set to 1:
///   K1^rho K2 eps^{-rho} |log eps|^{(d*-1)(1+rho) + rho gc* + gw*}.
inline double theorem1_work_for_accuracy(const ExpPolyModel& model, double eps) {
  if (!(eps > 0) || !(eps < 1)) throw InvalidArgument("theorem1_work_for_accuracy: need 0 < eps < 1");
  const auto s = rate_summary(model);
  const double log_power = (static_cast<double>(s.d_star) - 1.0) * (1.0 + s.rho) +
                           s.rho * s.decay_degree_star + s.work_degree_star;
  return std::pow(model.k1(), s.rho) * model.k2() * std::pow(eps, -s.rho) *
         std::pow(std::abs(std::log(eps)), log_power);
}

/// Hyperbolic cross { i >= 1 : prod_j i_j^{gc_j+gw_j} <= exp(L) } obtained as
/// the image of the level set with weights gc_j+gw_j under i_j = exp(k_j).
/// Members are stored shifted by one (entry i_j - 1) so that the set is an
/// ordinary downward-closed IndexSet; see hyperbolic_cross_points().
inline IndexSet hyperbolic_cross_set(std::span<const double> decay_degrees, std::span<const double> work_degrees,
                                     double level) {
  if (decay_degrees.size() != work_degrees.size() || decay_degrees.empty())
    throw InvalidArgument("hyperbolic_cross_set: degree vectors must be nonempty and equally long");
  const std::size_t d = decay_degrees.size();
  std::vector<double> gamma(d);
  for (std::size_t j = 0; j < d; ++j) {
    gamma[j] = decay_degrees[j] + work_degrees[j];
    if (!(gamma[j] > 0)) throw InvalidArgument("hyperbolic_cross_set: degree sums must be positive");
  }
  if (!(level >= 0)) throw InvalidArgument("hyperbolic_cross_set: level must be nonnegative");
  std::vector<MultiIndex> members;
  std::vector<MultiIndex::value_type> cur(d, 1);
  // Depth-first over 1-based parameters, pruning on sum gamma_j log i_j.
  auto recurse = [&](auto&& self, std::size_t pos, double used) -> void {
    if (pos == d) {
      std::vector<MultiIndex::value_type> shifted(d);
      for (std::size_t j = 0; j < d; ++j) shifted[j] = cur[j] - 1;
      members.push_back(MultiIndex::from_dense(shifted));
      return;
    }
    for (MultiIndex::value_type v = 1;; ++v) {
      const double s = used + gamma[pos] * std::log(static_cast<double>(v));
      if (!detail::within_level(s, level)) break;
      cur[pos] = v;
      self(self, pos + 1, s);
    }
    cur[pos] = 1;
  };
  recurse(recurse, 0, 0.0);
  return IndexSet(Dimension::finite(d), std::move(members));
}

inline IndexSet hyperbolic_cross_set(const std::vector<double>& decay_degrees, const std::vector<double>& work_degrees,
                                     double level) {
  return hyperbolic_cross_set(std::span<const double>(decay_degrees), std::span<const double>(work_degrees), level);
}

/// 1-based dense parameters of a set built by hyperbolic_cross_set.
inline std::vector<std::vector<MultiIndex::value_type>> hyperbolic_cross_points(const IndexSet& set) {
  std::vector<std::vector<MultiIndex::value_type>> pts;
  for (const auto& i : set) {
    auto v = i.to_dense(set.dimension().size());
    for (auto& x : v) ++x;
    pts.push_back(std::move(v));
  }
  return pts;
}

namespace detail {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double work_summand(const ExpPolyModel& m, const MultiIndex& i) {
  double p = 1.0;
  for (std::size_t j = 0; j < m.dimension(); ++j)
    p *= std::exp(m[j].work_rate * i[j]) * std::pow(i[j] + 1.0, m[j].work_degree);
  return p;
}

inline double decay_summand(const ExpPolyModel& m, const MultiIndex& i) {
  double p = 1.0;
  for (std::size_t j = 0; j < m.dimension(); ++j)
    p *= std::exp(-m[j].decay_rate * i[j]) * std::pow(i[j] + 1.0, m[j].decay_degree);
  return p;
}

// Partial sum of sum_{i>=0} exp(-c i)(i+1)^g up to the first M whose tail
// bound is below `tail_tol`. The tail bound uses the ratio of consecutive
// terms, t(i+1)/t(i) = exp(-c)((i+2)/(i+1))^g, which decreases in i.
struct SeriesSum {
  double partial = 0.0;
  double tail_bound = 0.0;
};

inline SeriesSum univariate_decay_series(double c, double g, double tail_tol) {
  CompensatedSum s;
  for (unsigned long m = 0;; ++m) {
    s.add(std::exp(-c * m) * std::pow(m + 1.0, g));
    // Terms with index > m: first is t(m+1); ratios from there are at most q.
    const double next = std::exp(-c * (m + 1.0)) * std::pow(m + 2.0, g);
    const double q = std::exp(-c) * std::pow((m + 3.0) / (m + 2.0), g);
    if (q < 1.0) {
      const double tail = next / (1.0 - q);
      if (tail < tail_tol) return {s.value(), tail};
    }
    if (m > 50'000'000) throw Error("univariate_decay_series: series converges too slowly");
  }
}

}  // namespace detail

/// prod_j K1_j sum_{i>=0} exp(-c_j i)(i+1)^{gc_j}, the limit of the
/// product-decay evaluator built from the model, to relative accuracy ~tol.
inline double decay_series_limit(const ExpPolyModel& model, double tol = 1e-14) {
  if (!(tol > 0)) throw InvalidArgument("decay_series_limit: tol must be positive");
  double p = 1.0;
  for (const auto& d : model.directions()) {
    const auto s = detail::univariate_decay_series(d.decay_rate, d.decay_degree, tol);
    p *= d.decay_constant * s.partial;
  }
  return p;
}

/// sum_{i in I_L} prod_j exp(w_j i_j)(i_j+1)^{gw_j}, by enumeration.
inline double appendix_work_sum(const ExpPolyModel& model, double level) {
  detail::CompensatedSum s;
  for (const auto& i : level_set_for_model(model, level)) s.add(detail::work_summand(model, i));
  return s.value();
}

/// sum_{i not in I_L} prod_j exp(-c_j i_j)(i_j+1)^{gc_j}, to additive
/// accuracy `tol`: the full-space sum factorizes into univariate series,
/// each truncated once its tail bound is small enough, and the enumerated
/// level-set part is subtracted.
inline double appendix_residual_sum(const ExpPolyModel& model, double level, double tol) {
  if (!(tol > 0)) throw InvalidArgument("appendix_residual_sum: tol must be positive");
  const std::size_t d = model.dimension();
  // Coarse pass bounds the product of the other factors (each factor >= 1).
  double product_bound = 1.0;
  for (std::size_t j = 0; j < d; ++j) {
    const auto s = detail::univariate_decay_series(model[j].decay_rate, model[j].decay_degree, 1.0);
    product_bound *= s.partial + s.tail_bound;
  }
  const double per_factor_tol = tol / (2.0 * static_cast<double>(d) * product_bound);
  double total = 1.0;
  for (std::size_t j = 0; j < d; ++j)
    total *= detail::univariate_decay_series(model[j].decay_rate, model[j].decay_degree, per_factor_tol).partial;
  detail::CompensatedSum inside;
  for (const auto& i : level_set_for_model(model, level)) inside.add(detail::decay_summand(model, i));
  return std::max(0.0, total - inside.value());
}

struct RatioRow {
  double level = 0.0;
  double work_sum = 0.0;
  double work_bound = 0.0;
  double work_ratio = 0.0;
  double residual_sum = 0.0;
  double residual_bound = 0.0;
  double residual_ratio = 0.0;
};

/// Ratios of the exact exponential sums to their bound shapes
/// exp(mu L)(L+1)^{d*-1+gw*} and exp(-nu L)(L+1)^{d*-1+gc*}.
inline std::vector<RatioRow> lemma_ratio_scan(const ExpPolyModel& model, std::span<const double> levels,
                                              double relative_tol = 1e-9) {
  for (std::size_t k = 1; k < levels.size(); ++k)
    if (!(levels[k] > levels[k - 1])) throw InvalidArgument("lemma_ratio_scan: levels must be increasing");
  const auto s = rate_summary(model);
  const double base = static_cast<double>(s.d_star) - 1.0;
  std::vector<RatioRow> rows;
  for (double L : levels) {
    RatioRow r;
    r.level = L;
    r.work_sum = appendix_work_sum(model, L);
    r.work_bound = std::exp(s.mu * L) * std::pow(L + 1.0, base + s.work_degree_star);
    r.work_ratio = r.work_sum / r.work_bound;
    r.residual_bound = std::exp(-s.nu * L) * std::pow(L + 1.0, base + s.decay_degree_star);
    r.residual_sum = appendix_residual_sum(model, L, relative_tol * r.residual_bound);
    r.residual_ratio = r.residual_sum / r.residual_bound;
    rows.push_back(r);
  }
  return rows;
}

inline void write_ratio_csv(std::ostream& os, std::span<const RatioRow> rows) {
  const auto old_precision = os.precision(17);
  os << "L,work_sum,work_bound,work_ratio,residual_sum,residual_bound,residual_ratio\n";
  for (const auto& r : rows)
    os << r.level << ',' << r.work_sum << ',' << r.work_bound << ',' << r.work_ratio << ',' << r.residual_sum
       << ',' << r.residual_bound << ',' << r.residual_ratio << '\n';
  os.precision(old_precision);
}

/// Least-squares slope of log(error) against log(work).
inline double fit_loglog_slope(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw InvalidArgument("fit_loglog_slope: need at least 3 points");
  double sx = 0, sy = 0;
  for (const auto& [x, y] : points) {
    if (!(x > 0) || !(y > 0)) throw InvalidArgument("fit_loglog_slope: entries must be positive");
    sx += std::log(x);
    sy += std::log(y);
  }
  const double n = static_cast<double>(points.size());
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (const auto& [x, y] : points) {
    sxx += (std::log(x) - mx) * (std::log(x) - mx);
    sxy += (std::log(x) - mx) * (std::log(y) - my);
  }
  if (sxx == 0) throw InvalidArgument("fit_loglog_slope: all work values coincide");
  return sxy / sxx;
}

inline double fit_loglog_slope(const std::vector<std::pair<double, double>>& points) {
  return fit_loglog_slope(std::span<const std::pair<double, double>>(points));
}

/// Named reference models for the ratio scans and the CLI.
inline const std::map<std::string, ExpPolyModel>& reference_models() {
  static const std::map<std::string, ExpPolyModel> models = {
      {"symmetric-d2", ExpPolyModel::from_rates({0.5, 0.5}, {0.5, 0.5})},
      {"poly-d2", ExpPolyModel::from_rates({0.5, 0.8}, {0.5, 0.2}, {1.0, 0.0}, {0.0, 0.0})},
      {"distinct-d3", ExpPolyModel::from_rates({0.8, 0.5, 0.2}, {0.2, 0.5, 0.8})},
  };
  return models;
}

}  // namespace smolyak
