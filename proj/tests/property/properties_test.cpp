// Randomized and exhaustive property checks. Uses only synthetic data.

#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"
#include "rulex/cart.hpp"
#include "rulex/errors.hpp"
#include "rulex/qga.hpp"
#include "rulex/qubo.hpp"
#include "rulex/rules.hpp"

using namespace rulex;

namespace {

Rule random_rule(Rng& rng, int d) {
  std::uniform_int_distribution<int> len(0, 6), feat(0, d - 1), op(0, 1);
  std::uniform_real_distribution<double> thr(-2.0, 2.0);
  Rule r;
  r.predicted_class = op(rng);
  const int n = len(rng);
  for (int k = 0; k < n; ++k)
    r.conditions.push_back({feat(rng), op(rng) ? Op::le : Op::gt, std::round(thr(rng) * 4) / 4});
  return r;
}

Dataset random_dataset(Rng& rng, std::size_t n, std::size_t d, int classes) {
  std::vector<double> x(n * d);
  std::uniform_int_distribution<int> grid(0, 9);
  for (auto& v : x) v = grid(rng) / 2.0;
  std::vector<int> y(n);
  std::uniform_int_distribution<int> cls(0, classes - 1);
  for (auto& v : y) v = cls(rng);
  std::vector<std::string> names, cnames;
  for (std::size_t k = 0; k < d; ++k) names.push_back("f" + std::to_string(k));
  for (int c = 0; c < classes; ++c) cnames.push_back("c" + std::to_string(c));
  return Dataset(std::move(x), d, names, std::move(y), cnames);
}

}  // namespace

TEST(SimplifyProperty, PreservesSemanticsAndIsIdempotent) {
  Rng rng(2024);
  constexpr int d = 3;
  std::uniform_real_distribution<double> pt(-2.5, 2.5);
  int vacuous = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const Rule r = random_rule(rng, d);
    std::vector<double> x(d);
    for (auto& v : x) v = std::round(pt(rng) * 4) / 4;  // hits thresholds exactly
    try {
      const Rule s = simplify(r);
      ASSERT_EQ(covers(s, x), covers(r, x));
      ASSERT_EQ(simplify(s), s);
      ASSERT_LE(s.length(), r.length());
      std::set<std::pair<int, int>> seen;
      for (const auto& c : s.conditions)
        ASSERT_TRUE(seen.insert({c.feature, static_cast<int>(c.op)}).second);
    } catch (const VacuousRuleError&) {
      // An empty interval covers nothing.
      ++vacuous;
      ASSERT_FALSE(covers(r, x));
    }
  }
  EXPECT_GT(vacuous, 0);
}

TEST(TernaryProperty, EncodeDecodeExhaustive) {
  for (std::size_t m = 1; m <= 8; ++m) {
    std::size_t count = 0;
    oracle::for_each_ternary(m, [&](const std::vector<int>& x) {
      ++count;
      const auto bits = encode_ternary(x);
      ASSERT_EQ(bits.size(), 2 * m);
      ASSERT_EQ(decode_ternary(bits), x);
    });
    std::size_t expected = 1;
    for (std::size_t k = 0; k < m; ++k) expected *= 3;
    EXPECT_EQ(count, expected);
  }
  // Every 2-bit pattern decodes per x = -1 + b1 + 2 b2; (1,1) leaves the domain.
  EXPECT_EQ(decode_ternary(BitString{0, 0}), std::vector<int>{-1});
  EXPECT_EQ(decode_ternary(BitString{1, 0}), std::vector<int>{0});
  EXPECT_EQ(decode_ternary(BitString{0, 1}), std::vector<int>{1});
  EXPECT_EQ(decode_ternary(BitString{1, 1}), std::vector<int>{2});
}

TEST(MutationProperty, ClipAlgebraTable) {
  // (r_i, m_i) -> clip(r_i + m_i, 0, 1)
  const int table[2][3] = {{0, 0, 1}, {0, 1, 1}};
  for (int r = 0; r <= 1; ++r)
    for (int m = -1; m <= 1; ++m) {
      Chromosome c(1);
      c.set(0, r == 1);
      TernaryVector v{{static_cast<std::int8_t>(m)}};
      EXPECT_EQ(apply_mutation(c, v)[0], table[r][m + 1] == 1) << r << " " << m;
    }
  // Componentwise on random vectors; the zero mutation is the identity and
  // applying m twice equals applying it once.
  Rng rng(5);
  std::uniform_int_distribution<int> t(-1, 1);
  for (int trial = 0; trial < 2000; ++trial) {
    Chromosome c(9);
    TernaryVector v{std::vector<std::int8_t>(9)};
    for (std::size_t i = 0; i < 9; ++i) {
      c.set(i, uniform01(rng) < 0.5);
      v.values[i] = static_cast<std::int8_t>(t(rng));
    }
    const auto once = apply_mutation(c, v);
    EXPECT_EQ(apply_mutation(once, v), once);
    EXPECT_EQ(apply_mutation(c, TernaryVector{std::vector<std::int8_t>(9, 0)}), c);
    for (std::size_t i = 0; i < 9; ++i)
      EXPECT_EQ(once[i], table[c[i] ? 1 : 0][v.values[i] + 1] == 1);
  }
}

TEST(TreeRuleProperty, RulesPartitionTheData) {
  Rng rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const auto data = random_dataset(rng, 60, 4, 3);
    for (const auto& tree : sweep(data, 4, static_cast<std::uint64_t>(trial))) {
      ASSERT_LE(tree.depth, tree.hyperparams.max_depth);
      const auto rules = extract_rules(tree);
      ASSERT_EQ(rules.size(), tree.leaf_count());
      std::vector<int> hits(data.num_instances(), 0);
      for (const auto& r : rules) {
        const auto s = simplify(r);
        const auto cov = coverage(r, data);
        ASSERT_EQ(coverage(s, data), cov);
        for (auto j : cov.indices()) ++hits[j];
      }
      for (int h : hits) ASSERT_EQ(h, 1);
    }
  }
}

TEST(DedupProperty, DistinctSignatures) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto data = random_dataset(rng, 40, 3, 2);
    std::vector<Rule> rules;
    for (int k = 0; k < 200; ++k) rules.push_back(random_rule(rng, 3));
    std::set<std::pair<std::vector<std::uint64_t>, int>> sigs;
    for (const auto& r : dedup(rules, data))
      ASSERT_TRUE(sigs.insert({coverage(r, data).words(), r.predicted_class}).second);
  }
}

TEST(ProblemProperty, SymmetryMonotonicityAndDefinition) {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    auto t = oracle::random_instance(rng, 8, 16);
    t.epsilon = 0.25;
    const auto p = t.to_problem();
    for (std::size_t i = 0; i < 8; ++i) {
      EXPECT_EQ(p.conflict(i, i), 0);
      for (std::size_t k = 0; k < 8; ++k) EXPECT_EQ(p.conflict(i, k), p.conflict(k, i));
    }
    Chromosome r(8);
    std::vector<int> bits(8, 0);
    int prev = 0;
    for (std::size_t i = 0; i < 8; ++i) {
      if (uniform01(rng) < 0.6) {
        r.set(i, true);
        bits[i] = 1;
      }
      const auto ev = fitness(p, r);
      EXPECT_GE(ev.covered, prev);
      prev = ev.covered;
      EXPECT_EQ(ev.conflicts, oracle::definitional_fitness(t, bits).conflict_sum);
    }
  }
}

TEST(QuboProperty, AlgebraicIdentities) {
  Rng rng(99);
  std::uniform_int_distribution<int> v(0, 30);
  for (int trial = 0; trial < 200; ++trial) {
    ConstraintSystem cs;
    for (int i = 0; i < 6; ++i) {
      cs.lengths.push_back(v(rng));
      cs.errors.push_back(v(rng));
    }
    cs.complexity_budget = 30;
    cs.error_budget = 30;
    const std::array<std::int64_t, 2> beta{v(rng), v(rng)};
    const auto qb = build_equality_qubo(cs, beta);
    const auto qk = build_kernel_qubo(cs);
    const auto kc = kernel_qubo_constant(cs);
    BitString x(6), X(12);
    for (auto& b : x) b = uniform01(rng) < 0.5;
    for (auto& b : X) b = uniform01(rng) < 0.5;
    std::int64_t a0 = -beta[0], a1 = -beta[1];
    for (int i = 0; i < 6; ++i) {
      a0 += cs.lengths[i] * x[i];
      a1 += cs.errors[i] * x[i];
    }
    EXPECT_EQ(qb.evaluate(x) + beta[0] * beta[0] + beta[1] * beta[1], a0 * a0 + a1 * a1);
    std::int64_t k0 = 0, k1 = 0;
    for (int i = 0; i < 6; ++i) {
      const int t = -1 + X[2 * i] + 2 * X[2 * i + 1];
      k0 += cs.lengths[i] * t;
      k1 += cs.errors[i] * t;
    }
    EXPECT_EQ(qk.evaluate(X) + kc, k0 * k0 + k1 * k1);
  }
}
