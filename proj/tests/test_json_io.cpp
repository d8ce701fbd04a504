#include <gtest/gtest.h>

#include "smolyak/json_io.hpp"
#include "smolyak/smolyak.hpp"
#include "support/generators.hpp"

using namespace smolyak;
using json_io::json;

TEST(JsonIndex, Forms) {
  const auto i = MultiIndex::from_dense({0, 2, 0, 1});
  EXPECT_EQ(json_io::dense_index(i, 4), json::parse("[0,2,0,1]"));
  EXPECT_EQ(json_io::sparse_index(i), json::parse(R"({"1":2,"3":1})"));
  EXPECT_EQ(json_io::parse_index(json::parse("[0,2,0,1]")), i);
  EXPECT_EQ(json_io::parse_index(json::parse(R"({"3":1,"1":2})")), i);
  EXPECT_EQ(json_io::parse_index(json::parse("{}")), MultiIndex{});
  EXPECT_THROW(json_io::parse_index(json::parse("[1,-2]")), InvalidArgument);
  EXPECT_THROW(json_io::parse_index(json::parse(R"({"x":1})")), InvalidArgument);
  EXPECT_THROW(json_io::parse_index(json::parse(R"({"1":0})")), InvalidArgument);
  EXPECT_THROW(json_io::parse_index(json::parse("3")), InvalidArgument);
}

TEST(JsonIndexSet, DenseRoundTrip) {
  testgen::Rng rng(79);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = testgen::pick(rng, 1, 4);
    const auto set = testgen::random_set(rng, d, 5, 20);
    const auto j = json_io::to_json(set);
    EXPECT_EQ(json_io::index_set_from_json(j), set);
    EXPECT_EQ(json_io::index_set_from_json(json::parse(j.dump())), set);
  }
}

TEST(JsonIndexSet, SparseRoundTrip) {
  const IndexSet set(Dimension::unbounded(),
                     {MultiIndex{}, MultiIndex::from_dense({1}), MultiIndex::from_entries({{7, 2}})});
  const auto j = json_io::to_json(set);
  EXPECT_EQ(j, json::parse(R"([{}, {"0":1}, {"7":2}])"));
  EXPECT_EQ(json_io::index_set_from_json(j), set);
  EXPECT_THROW(json_io::index_set_from_json(json::parse("[[0,1],[1]]")), InvalidArgument);
  EXPECT_THROW(json_io::index_set_from_json(json::parse("{}")), InvalidArgument);
}

TEST(JsonPlan, RoundTrip) {
  const auto plan = combination_coefficients(simplex_set(3, 3));
  const auto back = json_io::plan_from_json(json::parse(json_io::to_json(plan).dump()));
  ASSERT_EQ(back.terms.size(), plan.terms.size());
  for (std::size_t k = 0; k < plan.terms.size(); ++k) {
    EXPECT_EQ(back.terms[k].index, plan.terms[k].index);
    EXPECT_EQ(back.terms[k].coefficient, plan.terms[k].coefficient);
  }
  EXPECT_EQ(back.source_set, plan.source_set);
  EXPECT_EQ(json_io::to_json(plan)["schema_version"], 1);

  auto bad = json_io::to_json(plan);
  bad["schema_version"] = 2;
  EXPECT_THROW(json_io::plan_from_json(bad), InvalidArgument);
  auto outside = json_io::to_json(plan);
  outside["terms"][0]["index"] = json::parse("[9,9,9]");
  EXPECT_THROW(json_io::plan_from_json(outside), InvalidArgument);
}

TEST(JsonCache, RoundTripAndConflicts) {
  testgen::RandomEvaluator f(3, 11);
  EvaluationCache cache(f);
  smolyak_apply(cache, simplex_set(3, 3));
  const auto j = json::parse(json_io::cache_to_json(cache).dump());

  EvaluationCache restored(f);
  json_io::cache_from_json(j, restored);
  EXPECT_EQ(restored.size(), cache.size());
  EXPECT_EQ(restored.accounted_work(), cache.accounted_work());
  EXPECT_EQ(smolyak_apply(restored, simplex_set(3, 3)).value, smolyak_apply(cache, simplex_set(3, 3)).value);
  EXPECT_EQ(restored.misses(), 0u);

  json_io::cache_from_json(j, restored);
  auto conflicting = j;
  conflicting["entries"][0]["value"] = conflicting["entries"][0]["value"].get<double>() + 1.0;
  EXPECT_THROW(json_io::cache_from_json(conflicting, restored), InvalidArgument);

  testgen::RandomEvaluator g(2, 11);
  EvaluationCache other(g);
  EXPECT_THROW(json_io::cache_from_json(j, other), InvalidArgument);
}
