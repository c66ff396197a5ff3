#include <gtest/gtest.h>

#include <cmath>

#include "rulex/cart.hpp"
#include "rulex/errors.hpp"
#include "rulex/rules.hpp"

using namespace rulex;

namespace {

Dataset iris() {
  return prepare(load_csv(std::string(RULEX_DATA_DIR) + "/iris.csv", "class"),
                 MissingPolicy::drop_rows)
      .data;
}

Dataset xor4() {
  return Dataset({0, 0, 0, 1, 1, 0, 1, 1}, 2, {"a", "b"}, {0, 1, 1, 0}, {"p", "q"});
}

}  // namespace

TEST(Impurity, Examples) {
  const std::vector<int> uniform{50, 50, 50};
  EXPECT_NEAR(impurity(uniform, Criterion::gini), 2.0 / 3.0, 1e-12);
  const std::vector<int> pure{10, 0};
  EXPECT_EQ(impurity(pure, Criterion::entropy), 0.0);
  const std::vector<int> skew{25, 75};
  EXPECT_NEAR(impurity(skew, Criterion::gini), 1.0 - 0.25 * 0.25 - 0.75 * 0.75, 1e-12);
  EXPECT_NEAR(impurity(uniform, Criterion::entropy), std::log2(3.0), 1e-12);
  const std::vector<int> empty{0, 0};
  EXPECT_THROW(impurity(empty, Criterion::gini), DomainError);
}

TEST(FeaturesPerSplit, CeilingAndFloor) {
  EXPECT_EQ(features_per_split(MaxFeatures::sqrt, 4), 2u);
  EXPECT_EQ(features_per_split(MaxFeatures::sqrt, 13), 4u);
  EXPECT_EQ(features_per_split(MaxFeatures::log2, 13), 4u);
  EXPECT_EQ(features_per_split(MaxFeatures::log2, 1), 1u);
  EXPECT_EQ(features_per_split(MaxFeatures::sqrt, 1), 1u);
}

TEST(TrainTree, IrisFirstSplitOnPetal) {
  auto data = iris();
  // Among the seeded gini/best trees some see a petal feature at the root
  // and then isolate setosa with petal length <= 2.45.
  bool found = false;
  for (std::uint64_t seed = 0; seed < 20 && !found; ++seed) {
    HyperParams hp{Criterion::gini, Splitter::best, 3, MaxFeatures::sqrt, seed};
    auto tree = train_tree(data, hp);
    const auto& root = tree.nodes[0];
    ASSERT_FALSE(root.is_leaf());
    if (root.feature < 2) continue;
    for (const auto& r : extract_rules(tree))
      if (render(simplify(r), data) == "IF petal length <= 2.45 THEN CLASS=Iris-setosa")
        found = true;
  }
  EXPECT_TRUE(found);
}

TEST(TrainTree, PureDataGivesSingleLeaf) {
  Dataset d({1, 2, 3}, 1, {"a"}, {0, 0, 0}, {"p", "q"});
  auto tree = train_tree(d, HyperParams{Criterion::gini, Splitter::best, 4, MaxFeatures::sqrt, 1});
  EXPECT_EQ(tree.nodes.size(), 1u);
  EXPECT_EQ(tree.depth, 0);
  EXPECT_EQ(tree.nodes[0].majority, 0);
}

TEST(TrainTree, XorDepthOneSplitsWithImpureLeaves) {
  auto d = xor4();
  // No single axis-aligned split separates XOR: enumerate all candidates.
  for (std::size_t f = 0; f < 2; ++f) {
    std::vector<int> left(2, 0), right(2, 0);
    for (std::size_t j = 0; j < 4; ++j) (d.value(j, f) <= 0.5 ? left : right)[d.label(j)]++;
    EXPECT_GT(impurity(left, Criterion::gini), 0.0);
  }
  for (auto s : {Splitter::best, Splitter::random}) {
    auto tree = train_tree(d, HyperParams{Criterion::gini, s, 1, MaxFeatures::sqrt, 3});
    ASSERT_EQ(tree.nodes.size(), 3u);
    EXPECT_EQ(tree.depth, 1);
    for (const auto& n : tree.nodes)
      if (n.is_leaf()) EXPECT_GT(impurity(n.counts, Criterion::gini), 0.0);
  }
}

TEST(TrainTree, LinearlySeparableDepthOne) {
  Dataset d({1, 2, 3, 10, 11, 12}, 1, {"a"}, {0, 0, 0, 1, 1, 1}, {"p", "q"});
  auto tree = train_tree(d, HyperParams{Criterion::entropy, Splitter::best, 1, MaxFeatures::log2, 0});
  int errors = 0;
  for (std::size_t j = 0; j < d.num_instances(); ++j) errors += tree.predict(d.row(j)) != d.label(j);
  EXPECT_EQ(errors, 0);
  EXPECT_DOUBLE_EQ(tree.nodes[0].threshold, 6.5);
}

TEST(TrainTree, Deterministic) {
  auto data = iris();
  HyperParams hp{Criterion::entropy, Splitter::random, 3, MaxFeatures::log2, 42};
  auto a = train_tree(data, hp);
  auto b = train_tree(data, hp);
  ASSERT_EQ(a.nodes.size(), b.nodes.size());
  for (std::size_t k = 0; k < a.nodes.size(); ++k) {
    EXPECT_EQ(a.nodes[k].feature, b.nodes[k].feature);
    EXPECT_EQ(a.nodes[k].threshold, b.nodes[k].threshold);
    EXPECT_EQ(a.nodes[k].counts, b.nodes[k].counts);
  }
}

TEST(TrainTree, MajorityTieGoesToLowestClass) {
  Dataset d({1, 1}, 1, {"a"}, {1, 0}, {"p", "q"});
  auto tree = train_tree(d, HyperParams{Criterion::gini, Splitter::best, 2, MaxFeatures::sqrt, 0});
  ASSERT_EQ(tree.nodes.size(), 1u);  // constant feature: no split
  EXPECT_EQ(tree.nodes[0].majority, 0);
}

TEST(Sweep, TreeCounts) {
  auto data = iris();
  EXPECT_EQ(sweep(data, 3).size(), 24u);
  EXPECT_EQ(sweep(data, 1).size(), 8u);
  auto grid = sweep_grid(5);
  EXPECT_EQ(grid.size(), 40u);
  for (const auto& hp : grid) EXPECT_LE(hp.max_depth, 5);
  EXPECT_THROW(sweep_grid(0), DomainError);
}

TEST(Sweep, DepthBoundAndTotalRouting) {
  auto data = iris();
  for (const auto& tree : sweep(data, 3, 9)) {
    EXPECT_LE(tree.depth, tree.hyperparams.max_depth);
    std::vector<int> per_leaf(tree.nodes.size(), 0);
    for (std::size_t j = 0; j < data.num_instances(); ++j) {
      const auto leaf = tree.leaf_of(data.row(j));
      ASSERT_TRUE(tree.nodes[leaf].is_leaf());
      ++per_leaf[leaf];
    }
    for (std::size_t k = 0; k < tree.nodes.size(); ++k)
      if (tree.nodes[k].is_leaf()) {
        int total = 0;
        for (int c : tree.nodes[k].counts) total += c;
        EXPECT_EQ(total, per_leaf[k]);
        EXPECT_GE(total, 1);
      }
  }
}

TEST(DumpTree, MentionsFeatureNames) {
  auto data = iris();
  auto tree = train_tree(data, HyperParams{Criterion::gini, Splitter::best, 2, MaxFeatures::sqrt, 5});
  const auto text = dump_tree(tree, data);
  EXPECT_NE(text.find("<="), std::string::npos);
}
