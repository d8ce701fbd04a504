#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "smolyak/smolyak.hpp"
#include "support/generators.hpp"

using namespace smolyak;

namespace {

constexpr double e = std::numbers::e;

std::vector<std::vector<unsigned>> dense_points(const IndexSet& s) { return hyperbolic_cross_points(s); }

}  // namespace

TEST(RateSummary, Examples) {
  const auto mlmc = rate_summary(ExpPolyModel::from_rates({1.0 / 3, 1.0 / 3}, {2.0 / 3, 2.0 / 3}));
  EXPECT_DOUBLE_EQ(mlmc.rho, 2.0);
  EXPECT_DOUBLE_EQ(mlmc.mu, 2.0 / 3);
  EXPECT_DOUBLE_EQ(mlmc.nu, 1.0 / 3);
  EXPECT_EQ(mlmc.d_star, 2u);

  const auto single = rate_summary(ExpPolyModel::from_rates({1, 2}, {1, 1}));
  EXPECT_DOUBLE_EQ(single.rho, 1.0);
  EXPECT_EQ(single.argmax, std::vector<std::size_t>{0});
  EXPECT_EQ(single.d_star, 1u);
  EXPECT_DOUBLE_EQ(single.mu, 0.5);
  EXPECT_DOUBLE_EQ(single.nu, 0.5);

  const auto equal = rate_summary(ExpPolyModel::from_rates({0.7, 1.3, 2}, {0.7, 1.3, 2}));
  EXPECT_DOUBLE_EQ(equal.rho, 1.0);
  EXPECT_EQ(equal.d_star, 3u);
}

TEST(RateSummary, PolynomialDegreesOverArgmaxOnly) {
  const auto s = rate_summary(ExpPolyModel::from_rates({0.5, 0.8}, {0.5, 0.2}, {1.0, 3.0}, {0.5, 7.0}));
  EXPECT_EQ(s.argmax, std::vector<std::size_t>{0});
  EXPECT_DOUBLE_EQ(s.decay_degree_star, 1.0);
  EXPECT_DOUBLE_EQ(s.work_degree_star, 0.5);
}

TEST(RateSummaryProperty, MuPlusNuIsOne) {
  testgen::Rng rng(43);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = rate_summary(testgen::random_exp_model(rng, testgen::pick(rng, 1, 5)));
    EXPECT_EQ(s.mu + s.nu, 1.0);
    EXPECT_NEAR(s.nu, 1.0 / (1.0 + s.rho), 1e-15);
    EXPECT_GE(s.d_star, 1u);
  }
}

TEST(ExpPolyModel, Validation) {
  EXPECT_THROW(ExpPolyModel::from_rates({0.0}, {1.0}), InvalidArgument);
  EXPECT_THROW(ExpPolyModel::from_rates({1.0}, {1.0}, {-1.0}), InvalidArgument);
  EXPECT_THROW(ExpPolyModel::from_rates({1.0, 1.0}, {1.0}), InvalidArgument);
  EXPECT_THROW(ExpPolyModel({}), InvalidArgument);
}

TEST(ExpPolyModel, InducedProfitModel) {
  std::vector<Direction> dirs(1);
  dirs[0] = {2.0, 1.0, 1.0, 3.0, 0.25, 2.0};
  const auto p = ExpPolyModel(dirs).profit_model();
  EXPECT_DOUBLE_EQ(p.decay(0, 2), 2.0 * std::exp(-2.0) * 3.0);
  EXPECT_DOUBLE_EQ(p.work_factor(0, 2), 3.0 * std::exp(0.5) * 9.0);
}

TEST(LevelSetForModel, Examples) {
  const auto half = ExpPolyModel::from_rates({0.5, 0.5}, {0.5, 0.5});
  EXPECT_EQ(level_set_for_model(half, 2), simplex_set(2, 2));
  const auto mlmc = ExpPolyModel::from_rates({1.0 / 3, 1.0 / 3}, {2.0 / 3, 2.0 / 3});
  EXPECT_EQ(level_set_for_model(mlmc, 2), simplex_set(2, 2));
  EXPECT_EQ(level_set_for_model(mlmc, 0).size(), 1u);
}

TEST(PredictedBounds, Examples) {
  std::vector<Direction> dirs(2);
  dirs[0] = {3.0, 1.0, 0.0, 5.0, 1.0, 0.0};
  dirs[1] = {1.0, 2.0, 0.0, 1.0, 1.0, 0.0};
  const auto at0 = predicted_bounds(ExpPolyModel(dirs), 0.0);
  EXPECT_DOUBLE_EQ(at0.work, 5.0);
  EXPECT_DOUBLE_EQ(at0.error, 3.0);

  const auto unit = predicted_bounds(ExpPolyModel::from_rates({1, 1}, {1, 1}), 10.0);
  EXPECT_NEAR(unit.work, std::exp(5.0) * 11.0, 1e-9);
  EXPECT_NEAR(unit.error, std::exp(-5.0) * 11.0, 1e-15);

  const auto mlmc = ExpPolyModel::from_rates({1.0 / 3}, {2.0 / 3});
  const double r = predicted_bounds(mlmc, 12.0).work / predicted_bounds(mlmc, 6.0).work;
  EXPECT_NEAR(r, std::exp(2.0 / 3 * 6.0), 1e-9);
}

TEST(WorkForAccuracy, Examples) {
  std::vector<Direction> dirs(2);
  for (auto& d : dirs) d = {2.0, 1.0 / 3, 0.0, 3.0, 2.0 / 3, 0.0};
  const ExpPolyModel m(dirs);
  // K1 = 4, K2 = 9, rho = 2, d* = 2: K1^2 K2 e^2 |log eps|^3 at eps = 1/e.
  EXPECT_NEAR(theorem1_work_for_accuracy(m, std::exp(-1.0)), 16.0 * 9.0 * e * e, 1e-9);
  EXPECT_NEAR(theorem1_work_for_accuracy(m, std::exp(-2.0)), 16.0 * 9.0 * std::exp(4.0) * 8.0, 1e-6);

  const auto single = ExpPolyModel::from_rates({1.0, 2.0}, {1.5, 1.0});
  EXPECT_NEAR(theorem1_work_for_accuracy(single, 1e-3), std::pow(1e-3, -1.5), 1e-6);

  const auto unit = ExpPolyModel::from_rates({1.0}, {1.0});
  EXPECT_NEAR(theorem1_work_for_accuracy(unit, 0.01 / e) / theorem1_work_for_accuracy(unit, 0.01), e, 1e-12);
  EXPECT_THROW(theorem1_work_for_accuracy(unit, 1.0), InvalidArgument);
  EXPECT_THROW(theorem1_work_for_accuracy(unit, 0.0), InvalidArgument);
}

TEST(HyperbolicCross, Examples) {
  const std::vector<double> one{1.0, 1.0}, zero{0.0, 0.0};
  const auto s = hyperbolic_cross_set(one, zero, std::log(4.0));
  const auto pts = dense_points(s);
  const std::set<std::vector<unsigned>> got(pts.begin(), pts.end());
  const std::set<std::vector<unsigned>> want{{1, 1}, {1, 2}, {2, 1}, {1, 3}, {3, 1}, {1, 4}, {4, 1}, {2, 2}};
  EXPECT_EQ(got, want);
  EXPECT_TRUE(s.is_downward_closed());

  EXPECT_EQ(dense_points(hyperbolic_cross_set(one, zero, 0.0)), (std::vector<std::vector<unsigned>>{{1, 1}}));

  const double L = 3.7, gamma = 1.5;
  const auto line = hyperbolic_cross_set(std::vector<double>{gamma}, std::vector<double>{0.0}, L);
  EXPECT_EQ(line.size(), static_cast<std::size_t>(std::floor(std::exp(L / gamma))));
  EXPECT_THROW(hyperbolic_cross_set(zero, zero, 1.0), InvalidArgument);
}

TEST(HyperbolicCross, MatchesProductConstraint) {
  const std::vector<double> gc{0.5, 1.0, 0.25}, gw{0.5, 0.5, 0.75};
  const double L = 2.5;
  const auto s = hyperbolic_cross_set(gc, gw, L);
  std::size_t count = 0;
  for (unsigned a = 1; a <= 20; ++a)
    for (unsigned b = 1; b <= 20; ++b)
      for (unsigned c = 1; c <= 20; ++c)
        if (std::pow(a, 1.0) * std::pow(b, 1.5) * std::pow(c, 1.0) <= std::exp(L) * (1 + 1e-12)) {
          ++count;
          EXPECT_TRUE(s.contains(MultiIndex{a - 1, b - 1, c - 1}));
        }
  EXPECT_EQ(s.size(), count);
}

TEST(ExpSumWork, Examples) {
  const auto unit2 = ExpPolyModel::from_rates({1, 1}, {1, 1});
  EXPECT_NEAR(appendix_work_sum(unit2, 5.0), 1 + 2 * e + 3 * e * e, 1e-12);
  EXPECT_NEAR(appendix_work_sum(unit2, 5.0), 28.60, 0.01);
  EXPECT_EQ(appendix_work_sum(unit2, 0.0), 1.0);
  const auto unit1 = ExpPolyModel::from_rates({1}, {1});
  EXPECT_NEAR(appendix_work_sum(unit1, 4.0), 1 + e + e * e, 1e-12);
  EXPECT_NEAR(appendix_work_sum(unit1, 4.0), 11.11, 0.01);
}

TEST(ExpSumResidual, Examples) {
  const auto unit1 = ExpPolyModel::from_rates({1}, {1});
  EXPECT_NEAR(appendix_residual_sum(unit1, 0.0, 1e-14), 1.0 / (e - 1.0), 1e-13);
  EXPECT_NEAR(appendix_residual_sum(unit1, 0.0, 1e-14), 0.58198, 1e-5);
  EXPECT_LT(appendix_residual_sum(unit1, 200.0, 1e-20), 1e-18);

  const auto unit2 = ExpPolyModel::from_rates({1, 1}, {1, 1});
  const double want = std::pow(1.0 / (1.0 - 1.0 / e), 2) - (1 + 2 / e + 3 / (e * e));
  EXPECT_NEAR(appendix_residual_sum(unit2, 4.0, 1e-14), want, 1e-13);
  EXPECT_NEAR(appendix_residual_sum(unit2, 4.0, 1e-14), 0.3609, 1e-4);
  EXPECT_THROW(appendix_residual_sum(unit2, 4.0, 0.0), InvalidArgument);
}

TEST(ExpSumResidual, PolynomialDegreeAgainstDirectSummation) {
  const auto m = ExpPolyModel::from_rates({0.5, 0.8}, {0.5, 0.2}, {1.0, 0.0}, {0.0, 0.0});
  const double L = 6.0;
  double direct = 0.0;
  for (unsigned a = 0; a < 400; ++a)
    for (unsigned b = 0; b < 400; ++b)
      if (1.0 * a + 1.0 * b > L) direct += std::exp(-0.5 * a) * (a + 1.0) * std::exp(-0.8 * b);
  EXPECT_NEAR(appendix_residual_sum(m, L, 1e-13), direct, 1e-11);
}

TEST(ExpSums, ClosedFormsInOneDimension) {
  for (double c : {0.3, 1.0, 2.0})
    for (double w : {0.4, 1.0})
      for (double L : {0.0, 3.0, 10.0}) {
        const auto m = ExpPolyModel::from_rates({c}, {w});
        const double top = std::floor(L / (c + w) + 1e-12);
        EXPECT_NEAR(appendix_work_sum(m, L), std::expm1(w * (top + 1)) / std::expm1(w),
                    1e-12 * appendix_work_sum(m, L));
        EXPECT_NEAR(appendix_residual_sum(m, L, 1e-15), std::exp(-c * (top + 1)) / (-std::expm1(-c)), 1e-13);
      }
}

TEST(ExpSumsProperty, MonotoneInLevelAndConsistent) {
  testgen::Rng rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = testgen::random_exp_model(rng, testgen::pick(rng, 1, 3));
    double prev_size = 0, prev_work = 0, prev_res = 1e300;
    for (double L = 0; L <= 8; L += 0.5) {
      const double size = static_cast<double>(level_set_for_model(m, L).size());
      const double work = appendix_work_sum(m, L);
      const double res = appendix_residual_sum(m, L, 1e-12);
      EXPECT_GE(size, prev_size);
      EXPECT_GE(work, prev_work);
      EXPECT_LE(res, prev_res + 1e-12);
      prev_size = size;
      prev_work = work;
      prev_res = res;
    }
    EXPECT_NEAR(appendix_residual_sum(m, 0.0, 1e-13) + 1.0, decay_series_limit(m, 1e-15), 1e-12);
  }
}

TEST(RatioScan, Rows) {
  const auto m = ExpPolyModel::from_rates({1, 1}, {1, 1});
  const std::vector<double> one{7.0};
  const auto rows = lemma_ratio_scan(m, one);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_GT(rows[0].work_ratio, 0.0);
  EXPECT_GT(rows[0].residual_ratio, 0.0);
  const std::vector<double> bad{5.0, 5.0};
  EXPECT_THROW(lemma_ratio_scan(m, bad), InvalidArgument);
}

TEST(RatioScan, ReferenceModelsFlatten) {
  const std::vector<double> levels{5, 10, 15, 20, 25, 30, 35, 40};
  for (const auto& [name, model] : reference_models()) {
    const auto rows = lemma_ratio_scan(model, levels);
    const auto& a = rows[rows.size() - 2];
    const auto& b = rows.back();
    EXPECT_LT(std::abs(b.work_ratio - a.work_ratio) / a.work_ratio, 0.10) << name;
    EXPECT_LT(std::abs(b.residual_ratio - a.residual_ratio) / a.residual_ratio, 0.10) << name;
    for (const auto& r : rows) {
      EXPECT_TRUE(std::isfinite(r.work_ratio)) << name;
      EXPECT_TRUE(std::isfinite(r.residual_ratio)) << name;
    }
  }
}

TEST(FitLoglogSlope, Examples) {
  using P = std::vector<std::pair<double, double>>;
  EXPECT_NEAR(fit_loglog_slope(P{{1, 1}, {10, 0.1}, {100, 0.01}}), -1.0, 1e-14);
  EXPECT_NEAR(fit_loglog_slope(P{{1, 1}, {e, std::exp(-2.0)}, {e * e, std::exp(-4.0)}}), -2.0, 1e-14);
  testgen::Rng rng(53);
  P noisy;
  for (int k = 0; k < 40; ++k) {
    const double x = std::exp(0.25 * k);
    noisy.push_back({x, std::pow(x, -1.5) * std::exp(testgen::uniform(rng, -0.05, 0.05))});
  }
  EXPECT_NEAR(fit_loglog_slope(noisy), -1.5, 0.02);
  EXPECT_THROW(fit_loglog_slope(P{{1, 1}, {2, 0.5}}), InvalidArgument);
  EXPECT_THROW(fit_loglog_slope(P{{1, 1}, {2, 0.0}, {3, 1}}), InvalidArgument);
}
