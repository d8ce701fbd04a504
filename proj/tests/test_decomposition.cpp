#include <gtest/gtest.h>

#include <cmath>

#include "smolyak/smolyak.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace smolyak;

namespace {

auto product_method() {
  return make_evaluator<double>(Dimension::finite(2), [](const MultiIndex& i) { return double(i[0]) * i[1]; });
}

std::map<oracle::Dense, std::int64_t> as_map(const CombinationPlan& plan, std::size_t d) {
  std::map<oracle::Dense, std::int64_t> m;
  for (const auto& t : plan.terms) m[oracle::dense(t.index, d)] = t.coefficient;
  return m;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST(MixedDifference, Examples) {
  EXPECT_EQ(mixed_difference(product_method(), MultiIndex{1, 1}), 1.0);
  auto arbitrary = make_evaluator<double>(Dimension::finite(2), [](const MultiIndex&) { return 0.625; });
  EXPECT_EQ(mixed_difference(arbitrary, MultiIndex{0, 0}), 0.625);
  auto additive = make_evaluator<double>(Dimension::finite(2), [](const MultiIndex& i) {
    return std::pow(2.0, -double(i[0])) + std::pow(3.0, -double(i[1]));
  });
  EXPECT_NEAR(mixed_difference(additive, MultiIndex{1, 1}), 0.0, 1e-16);
}

TEST(MixedDifference, StencilHasTwoToTheSupportTerms) {
  EXPECT_EQ(mixed_difference_stencil(MultiIndex{0, 3, 0, 1}).size(), 4u);
  EXPECT_EQ(mixed_difference_stencil(MultiIndex{}).size(), 1u);
}

TEST(MixedDifference, MatchesRecursiveComposition) {
  testgen::Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = testgen::pick(rng, 1, 4);
    testgen::RandomEvaluator eval(d, rng());
    const auto i = testgen::random_index(rng, d, 3);
    auto f = [&](const oracle::Dense& v) {
      return eval.evaluate(MultiIndex::from_dense(std::vector<unsigned>(v.begin(), v.end()))).value;
    };
    EXPECT_NEAR(mixed_difference(eval, i), oracle::mixed_difference(f, oracle::dense(i, d)), 1e-13);
  }
}

TEST(MixedDifference, EvaluatorFailureCarriesIndex) {
  auto failing = make_evaluator<double>(Dimension::finite(2), [](const MultiIndex& i) -> double {
    if (i == MultiIndex{1, 0}) throw std::runtime_error("diverged");
    return 1.0;
  });
  try {
    mixed_difference(failing, MultiIndex{1, 1});
    FAIL() << "expected EvaluationError";
  } catch (const EvaluationError& e) {
    EXPECT_EQ(e.index(), (MultiIndex{1, 0}));
    EXPECT_EQ(e.detail(), "diverged");
  }
}

TEST(RectangularSum, Examples) {
  auto arbitrary = make_evaluator<double>(Dimension::finite(3), [](const MultiIndex&) { return -2.5; });
  EXPECT_EQ(rectangular_sum(arbitrary, MultiIndex{}), -2.5);
  EXPECT_EQ(rectangular_sum(product_method(), MultiIndex{2, 2}), 4.0);
  testgen::RandomEvaluator random(2, 99);
  EXPECT_LE(rel_err(rectangular_sum(random, MultiIndex{3, 3}), random.evaluate(MultiIndex{3, 3}).value), 1e-12);
}

TEST(RectangularSumProperty, InversionIdentity) {
  testgen::Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = testgen::pick(rng, 1, 3);
    testgen::RandomEvaluator eval(d, rng());
    const auto i = testgen::random_index(rng, d, 3);
    EXPECT_LE(rel_err(rectangular_sum(eval, i), eval.evaluate(i).value), 1e-12) << i.to_string();
  }
}

TEST(CombinationCoefficients, Examples) {
  const auto simplex = combination_coefficients(simplex_set(2, 2));
  const std::map<oracle::Dense, std::int64_t> want{{{1, 0}, -1}, {{0, 1}, -1}, {{2, 0}, 1}, {{1, 1}, 1}, {{0, 2}, 1}};
  EXPECT_EQ(as_map(simplex, 2), want);

  const auto single = combination_coefficients(IndexSet(Dimension::finite(2), {MultiIndex{}}));
  ASSERT_EQ(single.terms.size(), 1u);
  EXPECT_EQ(single.terms[0], (PlanTerm{MultiIndex{}, 1}));

  const auto box = combination_coefficients(box_set({1, 1}));
  ASSERT_EQ(box.terms.size(), 1u);
  EXPECT_EQ(box.terms[0], (PlanTerm{MultiIndex{1, 1}, 1}));
}

TEST(CombinationCoefficients, RejectsNonDownwardClosed) {
  EXPECT_THROW(combination_coefficients(IndexSet::from_dense(2, {{0, 0}, {1, 1}})), InvalidArgument);
}

TEST(CombinationCoefficients, UnboundedSetUsesItsSupport) {
  const IndexSet s(Dimension::unbounded(), {MultiIndex{}, MultiIndex::unit(0), MultiIndex::unit(7)});
  const auto plan = combination_coefficients(s);
  EXPECT_EQ(plan.coefficient_sum(), 1);
  ASSERT_EQ(plan.terms.size(), 3u);
  EXPECT_EQ(plan.terms[0].coefficient, -1);
}

TEST(SimplexCoefficients, Examples) {
  const auto d2 = simplex_coefficients(2, 2);
  for (const auto& t : d2.terms) EXPECT_EQ(t.coefficient, t.index.l1() == 2 ? 1 : -1);
  EXPECT_EQ(d2.terms.size(), 5u);

  for (const auto& t : simplex_coefficients(3, 3).terms) {
    const std::int64_t want[] = {0, 1, -2, 1};
    EXPECT_EQ(t.coefficient, want[t.index.l1()]);
  }
  for (unsigned L = 0; L < 6; ++L) {
    const auto d1 = simplex_coefficients(1, L);
    ASSERT_EQ(d1.terms.size(), 1u);
    EXPECT_EQ(d1.terms[0], (PlanTerm{MultiIndex{L}, 1}));
  }
  EXPECT_THROW(simplex_coefficients(0, 2), InvalidArgument);
}

TEST(SimplexCoefficients, EqualGeneralFormulaExactly) {
  for (std::size_t d = 1; d <= 4; ++d)
    for (unsigned L = 0; L <= 6; ++L) {
      const auto closed = simplex_coefficients(d, L);
      const auto general = combination_coefficients(simplex_set(d, L));
      EXPECT_EQ(closed.terms, general.terms) << "d=" << d << " L=" << L;
    }
}

TEST(CombinationProperty, MatchesBruteForceOracle) {
  testgen::Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = testgen::pick(rng, 1, 4);
    const auto s = testgen::random_downward_closed(rng, d, 5, 40);
    EXPECT_EQ(as_map(combination_coefficients(s), d), oracle::coefficients(oracle::dense_set(s), d));
  }
}

TEST(CombinationProperty, PlanEqualsDifferenceSum) {
  testgen::Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = testgen::pick(rng, 1, 4);
    const auto s = testgen::random_downward_closed(rng, d, 5, 40);
    testgen::RandomEvaluator eval(d, rng());
    const double a = smolyak_apply(eval, s).value;
    const double b = smolyak_apply_via_differences(eval, s).value;
    EXPECT_LE(rel_err(a, b), 1e-12);
  }
}

TEST(CombinationProperty, InteriorZeroAndUnitSum) {
  testgen::Rng rng(19);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = testgen::pick(rng, 1, 4);
    const auto s = testgen::random_downward_closed(rng, d, 4, 40);
    const auto plan = combination_coefficients(s);
    EXPECT_EQ(plan.coefficient_sum(), 1);
    for (const auto& t : plan.terms) {
      EXPECT_TRUE(s.contains(t.index));
      EXPECT_NE(t.coefficient, 0);
      MultiIndex corner = t.index;
      for (std::size_t j = 0; j < d; ++j) corner = corner.incremented(j);
      EXPECT_FALSE(s.contains(corner));
    }
  }
}

TEST(CombinationProperty, ConstantReproducedExactly) {
  testgen::Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = testgen::pick(rng, 1, 4);
    const auto s = testgen::random_downward_closed(rng, d, 4, 40);
    auto constant = make_evaluator<double>(Dimension::finite(d), [](const MultiIndex&) { return 0.375; });
    EXPECT_EQ(smolyak_apply(constant, s).value, 0.375);
  }
}
