#include <gtest/gtest.h>

#include "iris_tree.hpp"
#include "rulex/errors.hpp"
#include "rulex/problem.hpp"
#include "rulex/rules.hpp"

using namespace rulex;

namespace {

Dataset iris() {
  return prepare(load_csv(std::string(RULEX_DATA_DIR) + "/iris.csv", "class"),
                 MissingPolicy::drop_rows)
      .data;
}

Rule make(std::vector<Condition> cs, int cls) { return Rule{std::move(cs), cls}; }

}  // namespace

TEST(ExtractRules, IrisDepth5TreeHasNineRulesOfTotalLength34) {
  auto rules = extract_rules(oracle::iris_depth5_tree());
  ASSERT_EQ(rules.size(), 9u);
  int total = 0;
  for (const auto& r : rules) total += r.length();
  EXPECT_EQ(total, 34);
  EXPECT_EQ(rules[0].length(), 1);
  EXPECT_EQ(rules[4].length(), 5);
  EXPECT_EQ(rules[5].length(), 5);
  auto data = iris();
  EXPECT_EQ(render(rules[0], data), "IF petal length <= 2.45 THEN CLASS=Iris-setosa");
  EXPECT_EQ(render(rules[1], data),
            "IF petal length > 2.45 AND petal width <= 1.75 AND petal length <= 4.95 AND "
            "petal width <= 1.65 THEN CLASS=Iris-versicolor");
}

TEST(ExtractRules, SingleLeafAndStump) {
  DecisionTree leaf;
  TreeNode n;
  n.counts = {3, 1};
  n.majority = 0;
  leaf.nodes.push_back(n);
  auto rules = extract_rules(leaf);
  ASSERT_EQ(rules.size(), 1u);
  EXPECT_EQ(rules[0].length(), 0);
  EXPECT_EQ(rules[0].predicted_class, 0);

  Dataset d({1, 2, 3, 4}, 1, {"a"}, {0, 0, 1, 1}, {"p", "q"});
  auto stump = train_tree(d, HyperParams{Criterion::gini, Splitter::best, 1, MaxFeatures::sqrt, 0});
  auto sr = extract_rules(stump);
  ASSERT_EQ(sr.size(), 2u);
  EXPECT_EQ(sr[0].length(), 1);
  EXPECT_EQ(sr[1].length(), 1);
}

TEST(Simplify, Examples) {
  EXPECT_EQ(simplify(make({{0, Op::gt, 2.45}, {0, Op::gt, 3.0}}, 1)),
            make({{0, Op::gt, 3.0}}, 1));
  const auto minimal = make({{0, Op::le, 1.0}, {2, Op::gt, 0.5}}, 0);
  EXPECT_EQ(simplify(minimal), minimal);
  EXPECT_EQ(simplify(make({{1, Op::le, 5}, {1, Op::le, 4}, {1, Op::gt, 1}}, 0)),
            make({{1, Op::le, 4}, {1, Op::gt, 1}}, 0));
  EXPECT_THROW(simplify(make({{0, Op::gt, 2}, {0, Op::le, 2}}, 0)), VacuousRuleError);
}

TEST(Simplify, IrisDepth5RulesShrink) {
  int total = 0;
  for (const auto& r : extract_rules(oracle::iris_depth5_tree())) total += simplify(r).length();
  // Rules 4-6 repeat petal width / petal length bounds and lose conditions.
  EXPECT_LT(total, 34);
}

TEST(Covers, Examples) {
  auto data = iris();
  const auto r = make({{2, Op::le, 2.45}}, 0);
  EXPECT_EQ(data.value(0, 2), 1.4);
  EXPECT_TRUE(covers(r, data.row(0)));
  const std::vector<double> x{1.0};
  EXPECT_TRUE(covers(make({}, 0), x));
  EXPECT_FALSE(covers(make({{0, Op::gt, 1}, {0, Op::le, 2}}, 0), x));
}

TEST(RuleStats, Examples) {
  auto data = iris();
  auto st = rule_stats(make({{2, Op::le, 2.45}}, 0), data);
  EXPECT_EQ(st.cc, 50);
  EXPECT_EQ(st.ic, 0);
  EXPECT_EQ(st.length, 1);
  auto all = rule_stats(make({}, 1), data);
  EXPECT_EQ(all.cc, 50);
  EXPECT_EQ(all.coverage(), 150);
  auto none = rule_stats(make({{0, Op::gt, 100}}, 1), data);
  EXPECT_EQ(none.cc, 0);
  EXPECT_EQ(none.ic, 0);
}

TEST(Dedup, Examples) {
  auto data = iris();
  const auto r = make({{2, Op::le, 2.45}}, 0);
  EXPECT_EQ(dedup({r, r}, data).size(), 1u);
  // Empirically equivalent: another threshold in the same gap.
  const auto r2 = make({{2, Op::le, 2.0}}, 0);
  EXPECT_EQ(dedup({r, r2}, data), std::vector<Rule>{r});
  // Same coverage, other class: kept.
  EXPECT_EQ(dedup({r, make({{2, Op::le, 2.45}}, 1)}, data).size(), 2u);
  // Disjoint coverage: both kept, order preserved.
  const auto big = make({{2, Op::gt, 2.45}}, 1);
  EXPECT_EQ(dedup({big, r}, data), (std::vector<Rule>{big, r}));
  // Vacuous rules are dropped.
  EXPECT_TRUE(dedup({make({{0, Op::gt, 3}, {0, Op::le, 1}}, 0)}, data).empty());
}

TEST(Render, Formats) {
  auto data = iris();
  EXPECT_EQ(render(make({}, 2), data), "IF TRUE THEN CLASS=Iris-virginica");
  EXPECT_EQ(render(make({{2, Op::gt, 2.45}, {3, Op::le, 1.75}}, 1), data),
            "IF petal length > 2.45 AND petal width <= 1.75 THEN CLASS=Iris-versicolor");
  EXPECT_EQ(format_threshold(2.450), "2.45");
  EXPECT_EQ(format_threshold(1125.0), "1125");
  EXPECT_EQ(format_threshold(0.0324), "0.032");
  EXPECT_EQ(format_threshold(-0.0001), "0");
}

TEST(Render, ParseRoundTrip) {
  const std::vector<std::string> names{"a b", "OD280/OD315", "c"};
  const std::vector<std::string> classes{"1", "2"};
  const auto r = make({{0, Op::le, 3.82}, {1, Op::gt, 0.5}}, 1);
  const auto text = render(r, names, classes);
  EXPECT_EQ(text, "IF a b <= 3.82 AND OD280/OD315 > 0.5 THEN CLASS=2");
  EXPECT_EQ(parse_rule(text, names, classes), r);
  EXPECT_EQ(parse_rule("IF TRUE THEN CLASS=1", names, classes), make({}, 0));
  EXPECT_THROW(parse_rule("IF zz <= 1 THEN CLASS=1", names, classes), ParseError);
  EXPECT_THROW(parse_rule("IF a b <= 1 THEN CLASS=9", names, classes), ParseError);
}

TEST(Quantize, KeepsCoverageAndReadsBack) {
  auto data = iris();
  const auto r = make({{2, Op::le, 2.4500001}, {3, Op::gt, 0.123456}}, 0);
  const auto q = quantize_thresholds(r, data);
  EXPECT_EQ(coverage(q, data), coverage(r, data));
  const auto back = parse_rule(render(q, data), data.feature_names(), data.class_names());
  EXPECT_EQ(back, q);
}

TEST(RulePool, IrisSweep) {
  auto data = iris();
  auto pool = generate_rule_pool(data, 3, 0);
  EXPECT_EQ(pool.tree_count, 24u);
  // Same order of magnitude as the usual 64 unique rules.
  EXPECT_GE(pool.rules.size(), 20u);
  EXPECT_LE(pool.rules.size(), 200u);
  std::set<std::pair<std::vector<std::uint64_t>, int>> sigs;
  for (const auto& r : pool.rules)
    EXPECT_TRUE(sigs.insert({coverage(r, data).words(), r.predicted_class}).second);
}

TEST(TreeRules, PartitionAndNoConflicts) {
  auto data = iris();
  for (const auto& tree : sweep(data, 3, 4)) {
    auto rules = extract_rules(tree);
    std::vector<int> hits(data.num_instances(), 0);
    for (const auto& r : rules)
      for (auto j : coverage(r, data).indices()) ++hits[j];
    for (int h : hits) EXPECT_EQ(h, 1);
    auto p = build_problem(rules, data, 1.0, Budgets{100, 100});
    for (std::size_t i = 0; i < p.num_rules(); ++i)
      for (std::size_t k = 0; k < p.num_rules(); ++k) EXPECT_EQ(p.conflict(i, k), 0);
  }
}
