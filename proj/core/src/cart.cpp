#include "rulex/cart.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rulex/errors.hpp"

namespace rulex {

namespace {

constexpr double kImpurityTol = 1e-12;

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double score = 0.0;  // weighted child impurity

  bool better_than(const Split& other) const {
    if (other.feature < 0) return true;
    if (score < other.score - kImpurityTol) return true;
    if (score > other.score + kImpurityTol) return false;
    if (feature != other.feature) return feature < other.feature;
    return threshold < other.threshold;
  }
};

class Builder {
 public:
  Builder(const Dataset& data, const HyperParams& hp, Rng& rng)
      : data_(data), hp_(hp), rng_(rng),
        per_split_(features_per_split(hp.max_features, data.num_features())) {}

  DecisionTree build() {
    DecisionTree tree;
    tree.hyperparams = hp_;
    std::vector<std::size_t> all(data_.num_instances());
    std::iota(all.begin(), all.end(), std::size_t{0});
    grow(tree, all, 0);
    for (const auto& n : tree.nodes) tree.depth = std::max(tree.depth, n.depth);
    return tree;
  }

 private:
  std::vector<int> histogram(const std::vector<std::size_t>& idx) const {
    std::vector<int> counts(data_.num_classes(), 0);
    for (auto j : idx) ++counts[static_cast<std::size_t>(data_.label(j))];
    return counts;
  }

  double weighted(const std::vector<int>& left, const std::vector<int>& right,
                  int n_left, int n_right) const {
    const double n = n_left + n_right;
    return (n_left * impurity(left, hp_.criterion) +
            n_right * impurity(right, hp_.criterion)) / n;
  }

  int grow(DecisionTree& tree, const std::vector<std::size_t>& idx, int depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    {
      auto& node = tree.nodes.back();
      node.counts = histogram(idx);
      node.majority = static_cast<int>(
          std::max_element(node.counts.begin(), node.counts.end()) - node.counts.begin());
      node.depth = depth;
    }
    const auto& counts = tree.nodes[static_cast<std::size_t>(id)].counts;
    const bool pure = std::count_if(counts.begin(), counts.end(),
                                    [](int c) { return c > 0; }) <= 1;
    if (depth >= hp_.max_depth || pure) return id;

    Split split = find_split(idx, counts);
    if (split.feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (auto j : idx) {
      if (data_.value(j, static_cast<std::size_t>(split.feature)) <= split.threshold)
        left.push_back(j);
      else
        right.push_back(j);
    }
    const int l = grow(tree, left, depth + 1);
    const int r = grow(tree, right, depth + 1);
    auto& node = tree.nodes[static_cast<std::size_t>(id)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  Split find_split(const std::vector<std::size_t>& idx, const std::vector<int>& parent) {
    std::vector<std::size_t> order(data_.num_features());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng_);

    std::vector<std::size_t> chosen;
    for (auto k : order) {
      if (chosen.size() == per_split_) break;
      double lo = data_.value(idx.front(), k), hi = lo;
      for (auto j : idx) {
        lo = std::min(lo, data_.value(j, k));
        hi = std::max(hi, data_.value(j, k));
      }
      if (lo < hi) chosen.push_back(k);
    }

    Split best;
    for (auto k : chosen) {
      Split cand = hp_.splitter == Splitter::best ? best_threshold(idx, parent, k)
                                                  : random_threshold(idx, k);
      if (cand.feature >= 0 && cand.better_than(best)) best = cand;
    }
    return best;
  }

  Split best_threshold(const std::vector<std::size_t>& idx,
                       const std::vector<int>& parent, std::size_t k) const {
    std::vector<std::pair<double, int>> vals;
    vals.reserve(idx.size());
    for (auto j : idx) vals.emplace_back(data_.value(j, k), data_.label(j));
    std::sort(vals.begin(), vals.end());

    std::vector<int> left(parent.size(), 0), right = parent;
    Split best;
    const int n = static_cast<int>(vals.size());
    for (int i = 0; i + 1 < n; ++i) {
      const auto c = static_cast<std::size_t>(vals[static_cast<std::size_t>(i)].second);
      ++left[c];
      --right[c];
      const double a = vals[static_cast<std::size_t>(i)].first;
      const double b = vals[static_cast<std::size_t>(i) + 1].first;
      if (a == b) continue;
      double t = a + (b - a) / 2.0;
      if (t >= b) t = a;
      Split cand{static_cast<int>(k), t, weighted(left, right, i + 1, n - i - 1)};
      // The sweep visits thresholds in increasing order, so only strict
      // improvements replace the incumbent.
      if (best.feature < 0 || cand.score < best.score - kImpurityTol) best = cand;
    }
    return best;
  }

  Split random_threshold(const std::vector<std::size_t>& idx, std::size_t k) {
    double lo = data_.value(idx.front(), k), hi = lo;
    for (auto j : idx) {
      lo = std::min(lo, data_.value(j, k));
      hi = std::max(hi, data_.value(j, k));
    }
    double t = std::uniform_real_distribution<double>(lo, hi)(rng_);
    if (t >= hi) t = lo;
    std::vector<int> left(data_.num_classes(), 0), right(data_.num_classes(), 0);
    int nl = 0, nr = 0;
    for (auto j : idx) {
      const auto c = static_cast<std::size_t>(data_.label(j));
      if (data_.value(j, k) <= t) {
        ++left[c];
        ++nl;
      } else {
        ++right[c];
        ++nr;
      }
    }
    return {static_cast<int>(k), t, weighted(left, right, nl, nr)};
  }

  const Dataset& data_;
  const HyperParams& hp_;
  Rng& rng_;
  std::size_t per_split_;
};

}  // namespace

std::string to_string(Criterion c) { return c == Criterion::gini ? "gini" : "entropy"; }
std::string to_string(Splitter s) { return s == Splitter::best ? "best" : "random"; }
std::string to_string(MaxFeatures m) { return m == MaxFeatures::sqrt ? "sqrt" : "log2"; }

std::size_t features_per_split(MaxFeatures m, std::size_t d) {
  const double x = static_cast<double>(d);
  const double v = m == MaxFeatures::sqrt ? std::sqrt(x) : std::log2(x);
  auto k = static_cast<std::size_t>(std::ceil(v - 1e-12));
  return std::clamp<std::size_t>(k, 1, std::max<std::size_t>(d, 1));
}

double impurity(std::span<const int> counts, Criterion criterion) {
  long total = 0;
  for (int c : counts) {
    if (c < 0) throw DomainError("negative class count");
    total += c;
  }
  if (total == 0) throw DomainError("impurity of an empty node");
  const double n = static_cast<double>(total);
  double acc = 0.0;
  if (criterion == Criterion::gini) {
    for (int c : counts) {
      const double p = c / n;
      acc += p * p;
    }
    return 1.0 - acc;
  }
  for (int c : counts) {
    if (c == 0) continue;
    const double p = c / n;
    acc -= p * std::log2(p);
  }
  return acc;
}

std::size_t DecisionTree::leaf_of(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(
        x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return i;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const auto& n) { return n.is_leaf(); }));
}

DecisionTree train_tree(const Dataset& data, const HyperParams& hp, Rng& rng) {
  if (hp.max_depth < 1) throw DomainError("max_depth must be >= 1");
  if (data.num_instances() == 0) throw DegenerateDataError("empty dataset");
  return Builder(data, hp, rng).build();
}

DecisionTree train_tree(const Dataset& data, const HyperParams& hp) {
  Rng rng(hp.seed);
  return train_tree(data, hp, rng);
}

std::vector<HyperParams> sweep_grid(int max_depth_cap, std::uint64_t base_seed) {
  if (max_depth_cap < 1) throw DomainError("max_depth_cap must be >= 1");
  std::vector<HyperParams> grid;
  for (auto crit : {Criterion::gini, Criterion::entropy})
    for (auto split : {Splitter::best, Splitter::random})
      for (auto mf : {MaxFeatures::sqrt, MaxFeatures::log2})
        for (int depth = 1; depth <= max_depth_cap; ++depth) {
          HyperParams hp{crit, split, depth, mf, 0};
          hp.seed = derive_seed(base_seed, grid.size());
          grid.push_back(hp);
        }
  return grid;
}

std::vector<DecisionTree> sweep(const Dataset& data, int max_depth_cap,
                                std::uint64_t base_seed) {
  std::vector<DecisionTree> trees;
  for (const auto& hp : sweep_grid(max_depth_cap, base_seed))
    trees.push_back(train_tree(data, hp));
  return trees;
}

std::string dump_tree(const DecisionTree& tree, const Dataset& data) {
  std::ostringstream out;
  auto visit = [&](auto&& self, std::size_t i) -> void {
    const auto& n = tree.nodes[i];
    std::string pad(static_cast<std::size_t>(n.depth) * 2, ' ');
    if (n.is_leaf()) {
      out << pad << "class=" << data.class_names()[static_cast<std::size_t>(n.majority)]
          << " counts=[";
      for (std::size_t c = 0; c < n.counts.size(); ++c)
        out << (c ? "," : "") << n.counts[c];
      out << "]\n";
      return;
    }
    const auto& name = data.feature_names()[static_cast<std::size_t>(n.feature)];
    out << pad << name << " <= " << n.threshold << "\n";
    self(self, static_cast<std::size_t>(n.left));
    out << pad << name << " > " << n.threshold << "\n";
    self(self, static_cast<std::size_t>(n.right));
  };
  visit(visit, 0);
  return out.str();
}

}  // namespace rulex
