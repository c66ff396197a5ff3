#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rulex/dataset.hpp"
#include "rulex/rng.hpp"

namespace rulex {

enum class Criterion { gini, entropy };
enum class Splitter { best, random };
enum class MaxFeatures { sqrt, log2 };

std::string to_string(Criterion c);
std::string to_string(Splitter s);
std::string to_string(MaxFeatures m);

struct HyperParams {
  Criterion criterion = Criterion::gini;
  Splitter splitter = Splitter::best;
  int max_depth = 3;
  MaxFeatures max_features = MaxFeatures::sqrt;
  std::uint64_t seed = 0;
};

// Number of features examined per split: ceil(sqrt d) or ceil(log2 d), at
// least 1.
std::size_t features_per_split(MaxFeatures m, std::size_t d);

// Gini impurity 1 - sum p^2 or entropy -sum p log2 p of a class histogram.
// Throws DomainError when all counts are zero.
double impurity(std::span<const int> counts, Criterion criterion);

struct TreeNode {
  // Internal nodes: x goes left iff x[feature] <= threshold.
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  // Class histogram of the training instances reaching the node.
  std::vector<int> counts;
  int majority = 0;
  int depth = 0;

  bool is_leaf() const noexcept { return feature < 0; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  HyperParams hyperparams;
  int depth = 0;

  // Index of the leaf reached by x.
  std::size_t leaf_of(std::span<const double> x) const;
  int predict(std::span<const double> x) const { return nodes[leaf_of(x)].majority; }
  std::size_t leaf_count() const;
};

// Greedy CART induction. At every node a random subset of candidate features
// is examined (constant features do not count towards the subset size). The
// best splitter scans midpoints between consecutive distinct values; the
// random splitter draws one uniform threshold per feature in its observed
// range. Ties prefer the lower feature index, then the smaller threshold.
// Recursion stops at max_depth, on a pure node or when no feature varies.
DecisionTree train_tree(const Dataset& data, const HyperParams& hp, Rng& rng);
DecisionTree train_tree(const Dataset& data, const HyperParams& hp);

// All 8 * max_depth_cap combinations of criterion x splitter x max_features x
// depth in 1..cap, in that nesting order. Combination i is seeded with
// derive_seed(base_seed, i).
std::vector<HyperParams> sweep_grid(int max_depth_cap, std::uint64_t base_seed = 0);
std::vector<DecisionTree> sweep(const Dataset& data, int max_depth_cap,
                                std::uint64_t base_seed = 0);

std::string dump_tree(const DecisionTree& tree, const Dataset& data);

}  // namespace rulex
