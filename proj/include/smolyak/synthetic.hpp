#pragma once

/// \file synthetic.hpp
/// Evaluators with prescribed mixed-difference structure.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "smolyak/error.hpp"
#include "smolyak/evaluator.hpp"
#include "smolyak/truncation.hpp"

namespace smolyak {

/// N(i) = prod_j G_j(i_j) with G_j(i) = sum_{s<=i} g_j(s), so that
/// mixed_difference(N, i) = prod_j g_j(i_j) exactly. The work of N(i) is
/// the model's work(i).
class ProductDecayEvaluator {
 public:
  using value_type = double;

  explicit ProductDecayEvaluator(ProfitModel model) : model_(std::move(model)) {}

  Dimension dimension() const { return Dimension::finite(model_.dimension()); }

  Evaluation<double> evaluate(const MultiIndex& i) const {
    if (!i.fits(dimension())) throw InvalidArgument("index " + i.to_string() + " outside dimension");
    double p = 1.0;
    for (std::size_t j = 0; j < model_.dimension(); ++j) {
      double g = 0.0;
      for (MultiIndex::value_type s = 0; s <= i[j]; ++s) g += model_.decay(j, s);
      p *= g;
    }
    return {p, model_.work(i)};
  }

  /// The limit prod_j sum_s g_j(s), given per-direction series values.
  static double limit(const std::vector<double>& series) {
    double p = 1.0;
    for (double s : series) p *= s;
    return p;
  }

  const ProfitModel& model() const { return model_; }

 private:
  ProfitModel model_;
};

/// Vector-valued error expansion
///   N(i) = sum_{J subset {0..d-1}} a_J prod_{j in J} f_j(h_j),
///   h_j = 2^{-i_j},  f_j(h) = h^2 + beta_j h^3,
/// with the J = {} term playing the role of the limit. Mixed differences
/// then decay like prod_{j in supp i} 4^{-i_j}.
class ErrorExpansionEvaluator {
 public:
  using value_type = std::vector<double>;

  /// `coefficients[mask]` is a_J for the subset J encoded by `mask`.
  ErrorExpansionEvaluator(std::vector<double> beta, std::vector<std::vector<double>> coefficients)
      : beta_(std::move(beta)), a_(std::move(coefficients)) {
    if (beta_.empty() || beta_.size() > 20) throw InvalidArgument("ErrorExpansionEvaluator: 1 <= d <= 20");
    if (a_.size() != (std::size_t{1} << beta_.size()))
      throw InvalidArgument("ErrorExpansionEvaluator: need one coefficient vector per subset");
    for (const auto& v : a_)
      if (v.size() != a_.front().size() || v.empty())
        throw InvalidArgument("ErrorExpansionEvaluator: coefficient vectors must share a positive length");
  }

  Dimension dimension() const { return Dimension::finite(beta_.size()); }

  Evaluation<std::vector<double>> evaluate(const MultiIndex& i) const {
    if (!i.fits(dimension())) throw InvalidArgument("index " + i.to_string() + " outside dimension");
    const std::size_t d = beta_.size();
    std::vector<double> f(d);
    for (std::size_t j = 0; j < d; ++j) {
      const double h = std::ldexp(1.0, -static_cast<int>(i[j]));
      f[j] = h * h + beta_[j] * h * h * h;
    }
    std::vector<double> out(a_.front().size(), 0.0);
    for (std::size_t mask = 0; mask < a_.size(); ++mask) {
      double p = 1.0;
      for (std::size_t j = 0; j < d; ++j)
        if (mask & (std::size_t{1} << j)) p *= f[j];
      for (std::size_t m = 0; m < out.size(); ++m) out[m] += a_[mask][m] * p;
    }
    return {std::move(out), 1.0};
  }

  /// Decay function 4^{-i} shared by every direction.
  static double decay(MultiIndex::value_type i) { return std::ldexp(1.0, -2 * static_cast<int>(i)); }

 private:
  std::vector<double> beta_;
  std::vector<std::vector<double>> a_;
};

}  // namespace smolyak
