#include "rulex/qubo.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <tuple>

#include "rulex/errors.hpp"
#include "sampling.hpp"

namespace rulex {

std::int64_t QuboMatrix::evaluate(std::span<const std::uint8_t> x) const noexcept {
  std::int64_t acc = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    if (!x[i]) continue;
    const auto* row = q_.data() + i * n_;
    for (std::size_t j = 0; j < n_; ++j)
      if (x[j]) acc += row[j];
  }
  return acc;
}

FactoredQubo::FactoredQubo(std::vector<std::vector<std::int64_t>> factor,
                           std::vector<std::int64_t> diag)
    : factor_(std::move(factor)), diag_(std::move(diag)) {
  for (const auto& row : factor_)
    if (row.size() != diag_.size()) throw DomainError("factor width mismatch");
}

std::int64_t FactoredQubo::evaluate(std::span<const std::uint8_t> x) const noexcept {
  std::int64_t acc = 0;
  for (std::size_t i = 0; i < diag_.size(); ++i)
    if (x[i]) acc += diag_[i];
  for (const auto& row : factor_) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < row.size(); ++i)
      if (x[i]) s += row[i];
    acc += s * s;
  }
  return acc;
}

QuboMatrix FactoredQubo::to_dense() const {
  QuboMatrix q(size());
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j = 0; j < size(); ++j) {
      std::int64_t v = 0;
      for (const auto& row : factor_) v += row[i] * row[j];
      q.set(i, j, v);
    }
    q.add(i, i, diag_[i]);
  }
  return q;
}

template <class Objective>
QuboGaResult qubo_ga(const Objective& q, const QuboGaConfig& config, Rng& rng) {
  const int n = config.population;
  if (n < 2 || n % 2 != 0) throw DomainError("QUBO GA population must be even and >= 2");
  const std::size_t len = q.size();
  const auto un = static_cast<std::size_t>(n);

  struct Individual {
    BitString bits;
    std::int64_t objective;
  };

  std::vector<Individual> pop;
  pop.reserve(2 * un);
  for (std::size_t k = 0; k < un; ++k) {
    // Per-individual density spreads the initial population over sparse and
    // dense strings alike.
    const double density = uniform01(rng);
    BitString x(len);
    for (auto& b : x) b = uniform01(rng) < density ? 1 : 0;
    const auto obj = q.evaluate(x);
    pop.push_back({std::move(x), obj});
  }

  auto best_of = [](const std::vector<Individual>& p) {
    std::int64_t b = p.front().objective;
    for (const auto& ind : p) b = std::min(b, ind.objective);
    return b;
  };

  QuboGaResult result;
  result.best_per_generation.push_back(best_of(pop));
  std::vector<double> weights(un);
  std::uniform_int_distribution<std::size_t> pick_bit(0, len == 0 ? 0 : len - 1);
  std::bernoulli_distribution coin(0.5);

  for (int t = 0; t < config.generations && len > 0; ++t) {
    std::int64_t worst = pop.front().objective;
    for (const auto& ind : pop) worst = std::max(worst, ind.objective);
    for (std::size_t k = 0; k < un; ++k)
      weights[k] = static_cast<double>(worst - pop[k].objective) + 1.0;

    for (std::size_t pair = 0; pair < un / 2; ++pair) {
      const auto a = detail::sample_weighted(weights, rng);
      const auto b = detail::sample_weighted(weights, rng, a);
      BitString c1(len), c2(len);
      for (std::size_t i = 0; i < len; ++i) {
        const bool swap = coin(rng);
        c1[i] = swap ? pop[b].bits[i] : pop[a].bits[i];
        c2[i] = swap ? pop[a].bits[i] : pop[b].bits[i];
      }
      c1[pick_bit(rng)] ^= 1;
      c2[pick_bit(rng)] ^= 1;
      const auto o1 = q.evaluate(c1);
      const auto o2 = q.evaluate(c2);
      pop.push_back({std::move(c1), o1});
      pop.push_back({std::move(c2), o2});
    }

    std::stable_sort(pop.begin(), pop.end(), [](const auto& x, const auto& y) {
      return x.objective < y.objective;
    });
    std::vector<Individual> next;
    std::vector<Individual> spare;
    std::set<BitString> seen;
    next.reserve(un);
    for (auto& ind : pop) {
      if (next.size() < un && seen.insert(ind.bits).second)
        next.push_back(std::move(ind));
      else
        spare.push_back(std::move(ind));
    }
    for (std::size_t k = 0; next.size() < un; ++k) next.push_back(std::move(spare[k]));
    std::stable_sort(next.begin(), next.end(), [](const auto& x, const auto& y) {
      return x.objective < y.objective;
    });
    pop = std::move(next);
    const auto best = best_of(pop);
    if (best > result.best_per_generation.back())
      throw InvariantViolation("QUBO GA best objective increased");
    result.best_per_generation.push_back(best);
  }

  std::stable_sort(pop.begin(), pop.end(), [](const auto& x, const auto& y) {
    return x.objective < y.objective;
  });
  for (auto& ind : pop) {
    result.objectives.push_back(ind.objective);
    result.population.push_back(std::move(ind.bits));
  }
  return result;
}

template QuboGaResult qubo_ga<QuboMatrix>(const QuboMatrix&, const QuboGaConfig&, Rng&);
template QuboGaResult qubo_ga<FactoredQubo>(const FactoredQubo&, const QuboGaConfig&, Rng&);

namespace {

void check_overflow(const ConstraintSystem& cs) {
  std::int64_t sl = 0, se = 0;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (cs.lengths[i] < 0 || cs.errors[i] < 0)
      throw DomainError("constraint matrix entries must be >= 0");
    sl += cs.lengths[i];
    se += cs.errors[i];
  }
  if (sl >= (std::int64_t{1} << 31) || se >= (std::int64_t{1} << 31))
    throw DomainError("constraint sums exceed 2^31");
}

ConstraintSystem restrict_columns(const ConstraintSystem& cs,
                                  std::span<const std::size_t> idx) {
  ConstraintSystem out;
  out.complexity_budget = cs.complexity_budget;
  out.error_budget = cs.error_budget;
  for (auto i : idx) {
    out.lengths.push_back(cs.lengths[i]);
    out.errors.push_back(cs.errors[i]);
  }
  return out;
}

std::vector<std::size_t> random_subset(std::size_t total, std::size_t k, Rng& rng) {
  std::vector<std::size_t> idx(total);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  k = std::min(k, total);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> d(i, total - 1);
    std::swap(idx[i], idx[d(rng)]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::size_t auto_draws(std::size_t total, std::size_t sub, std::size_t configured) {
  if (configured > 0) return configured;
  return ((total + sub - 1) / sub) * 4;
}

}  // namespace

QuboMatrix build_equality_qubo(const ConstraintSystem& cs, std::array<std::int64_t, 2> beta) {
  check_overflow(cs);
  return equality_qubo_factored(cs, beta).to_dense();
}

FactoredQubo equality_qubo_factored(const ConstraintSystem& cs,
                                    std::array<std::int64_t, 2> beta) {
  std::vector<std::int64_t> diag(cs.size());
  for (std::size_t i = 0; i < cs.size(); ++i)
    diag[i] = -2 * (beta[0] * cs.lengths[i] + beta[1] * cs.errors[i]);
  return FactoredQubo({cs.lengths, cs.errors}, std::move(diag));
}

std::vector<std::array<std::int64_t, 2>> beta_grid(const ConstraintSystem& cs, int per_axis) {
  auto axis = [per_axis](std::int64_t b) {
    std::set<std::int64_t> vals;
    for (int k = 0; k < per_axis; ++k) {
      // Round half up of k * b / (per_axis - 1).
      const std::int64_t den = per_axis - 1;
      vals.insert(per_axis == 1 ? b : (2 * k * b + den) / (2 * den));
    }
    return vals;
  };
  std::vector<std::array<std::int64_t, 2>> out;
  for (auto c : axis(cs.complexity_budget))
    for (auto e : axis(cs.error_budget)) out.push_back({c, e});
  return out;
}

std::vector<Chromosome> solve_inequality_system(
    const ConstraintSystem& cs, const std::vector<std::array<std::int64_t, 2>>& betas,
    const InequalityConfig& config, Rng& rng) {
  check_overflow(cs);
  const std::size_t m_total = cs.size();
  std::set<Chromosome> found;
  found.insert(Chromosome(m_total));
  if (m_total == 0 || betas.empty()) return {found.begin(), found.end()};

  const std::size_t sub = std::max<std::size_t>(1, std::min(config.subspace_size, m_total));
  const std::size_t draws = auto_draws(m_total, sub, config.draws_per_beta);
  const std::uint64_t base = rng();

  for (std::size_t b = 0; b < betas.size(); ++b) {
    const auto& beta = betas[b];
    if (beta[0] < 0 || beta[1] < 0 || beta[0] > cs.complexity_budget ||
        beta[1] > cs.error_budget)
      throw DomainError("beta must satisfy 0 <= beta <= b");
    for (std::size_t d = 0; d < draws; ++d) {
      Rng local(derive_seed(base, b * draws + d));
      const auto idx = random_subset(m_total, sub, local);
      const auto q = equality_qubo_factored(restrict_columns(cs, idx), beta);
      const auto res = qubo_ga(q, config.ga, local);
      for (const auto& x : res.population) {
        Chromosome lifted(m_total);
        for (std::size_t k = 0; k < idx.size(); ++k)
          if (x[k]) lifted.set(idx[k], true);
        if (cs.satisfied_by(lifted.bits())) found.insert(std::move(lifted));
      }
    }
  }
  return {found.begin(), found.end()};
}

std::size_t TernaryVector::nonzeros() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [](auto v) { return v != 0; }));
}

TernaryVector TernaryVector::negated() const {
  TernaryVector out = *this;
  for (auto& v : out.values) v = static_cast<std::int8_t>(-v);
  return out;
}

BitString encode_ternary(std::span<const int> x) {
  BitString bits(2 * x.size(), 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    switch (x[i]) {
      case -1: break;
      case 0: bits[2 * i] = 1; break;
      case 1: bits[2 * i + 1] = 1; break;
      default: throw DomainError("ternary value out of range");
    }
  }
  return bits;
}

std::vector<int> decode_ternary(std::span<const std::uint8_t> bits) {
  if (bits.size() % 2 != 0) throw DomainError("odd-length ternary encoding");
  std::vector<int> x(bits.size() / 2);
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = -1 + bits[2 * i] + 2 * bits[2 * i + 1];
  return x;
}

std::int64_t kernel_norm(const ConstraintSystem& cs, const TernaryVector& m) {
  std::int64_t a = 0, b = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    a += cs.lengths[i] * m.values[i];
    b += cs.errors[i] * m.values[i];
  }
  return a * a + b * b;
}

FactoredQubo kernel_qubo_factored(const ConstraintSystem& cs) {
  const std::size_t m = cs.size();
  const std::int64_t sum_l = std::accumulate(cs.lengths.begin(), cs.lengths.end(), std::int64_t{0});
  const std::int64_t sum_e = std::accumulate(cs.errors.begin(), cs.errors.end(), std::int64_t{0});
  std::vector<std::vector<std::int64_t>> factor(2, std::vector<std::int64_t>(2 * m));
  std::vector<std::int64_t> diag(2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::int64_t w = 1; w <= 2; ++w) {
      const std::size_t col = 2 * i + static_cast<std::size_t>(w - 1);
      factor[0][col] = cs.lengths[i] * w;
      factor[1][col] = cs.errors[i] * w;
      // 2 (L^T Q_I E)_col with L = -1.
      diag[col] = -2 * w * (cs.lengths[i] * sum_l + cs.errors[i] * sum_e);
    }
  }
  return FactoredQubo(std::move(factor), std::move(diag));
}

QuboMatrix build_kernel_qubo(const ConstraintSystem& cs) {
  check_overflow(cs);
  return kernel_qubo_factored(cs).to_dense();
}

std::int64_t kernel_qubo_constant(const ConstraintSystem& cs) {
  const std::int64_t sum_l = std::accumulate(cs.lengths.begin(), cs.lengths.end(), std::int64_t{0});
  const std::int64_t sum_e = std::accumulate(cs.errors.begin(), cs.errors.end(), std::int64_t{0});
  return sum_l * sum_l + sum_e * sum_e;
}

std::vector<TernaryVector> approximate_kernel(const ConstraintSystem& cs,
                                              const KernelConfig& config, Rng& rng) {
  check_overflow(cs);
  const std::size_t m_total = cs.size();
  std::set<TernaryVector> found;
  if (m_total > 0) {
    const std::size_t sub = std::max<std::size_t>(1, std::min(config.subspace_size, m_total));
    const std::size_t draws = auto_draws(m_total, sub, config.draws);
    const std::uint64_t base = rng();
    for (std::size_t d = 0; d < draws; ++d) {
      Rng local(derive_seed(base, d));
      const auto idx = random_subset(m_total, sub, local);
      const auto q = kernel_qubo_factored(restrict_columns(cs, idx));
      const auto res = qubo_ga(q, config.ga, local);
      for (const auto& bits : res.population) {
        const auto x = decode_ternary(bits);
        if (std::any_of(x.begin(), x.end(), [](int v) { return v > 1; })) continue;
        TernaryVector v{std::vector<std::int8_t>(m_total, 0)};
        for (std::size_t k = 0; k < idx.size(); ++k)
          v.values[idx[k]] = static_cast<std::int8_t>(x[k]);
        if (v.nonzeros() == 0) continue;
        found.insert(v.negated());
        found.insert(std::move(v));
      }
    }
  }
  if (found.empty()) {
    for (std::size_t i = 0; i < m_total; ++i)
      for (std::int8_t s : {std::int8_t{1}, std::int8_t{-1}}) {
        TernaryVector v{std::vector<std::int8_t>(m_total, 0)};
        v.values[i] = s;
        found.insert(std::move(v));
      }
  }

  struct Keyed {
    std::int64_t norm;
    std::size_t nnz;
    TernaryVector canonical;  // min(v, -v), keeps each +-pair adjacent
    TernaryVector v;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(found.size());
  for (const auto& v : found) {
    auto neg = v.negated();
    keyed.push_back({kernel_norm(cs, v), v.nonzeros(), std::min(v, neg), v});
  }
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    return std::tie(a.norm, a.nnz, a.canonical, a.v) < std::tie(b.norm, b.nnz, b.canonical, b.v);
  });
  std::vector<TernaryVector> out;
  const std::size_t keep = std::min(keyed.size(), config.max_candidates);
  out.reserve(keep);
  for (std::size_t k = 0; k < keep; ++k) out.push_back(std::move(keyed[k].v));
  return out;
}

}  // namespace rulex
