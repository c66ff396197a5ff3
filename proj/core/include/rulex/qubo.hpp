#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "rulex/problem.hpp"
#include "rulex/rng.hpp"

namespace rulex {

using BitString = std::vector<std::uint8_t>;

// Dense square integer matrix; objective x^T Q x over binary x.
class QuboMatrix {
 public:
  QuboMatrix() = default;
  explicit QuboMatrix(std::size_t n) : n_(n), q_(n * n, 0) {}

  std::size_t size() const noexcept { return n_; }
  std::int64_t at(std::size_t i, std::size_t j) const noexcept { return q_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, std::int64_t v) noexcept { q_[i * n_ + j] = v; }
  void add(std::size_t i, std::size_t j, std::int64_t v) noexcept { q_[i * n_ + j] += v; }

  std::int64_t evaluate(std::span<const std::uint8_t> x) const noexcept;

  friend bool operator==(const QuboMatrix&, const QuboMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::int64_t> q_;
};

// Q = F^T F + diag(d), kept factored so evaluation costs O(rank * n).
// Both QUBOs built from the two-row constraint system have this shape.
class FactoredQubo {
 public:
  FactoredQubo(std::vector<std::vector<std::int64_t>> factor, std::vector<std::int64_t> diag);

  std::size_t size() const noexcept { return diag_.size(); }
  std::int64_t evaluate(std::span<const std::uint8_t> x) const noexcept;
  QuboMatrix to_dense() const;

 private:
  std::vector<std::vector<std::int64_t>> factor_;
  std::vector<std::int64_t> diag_;
};

struct QuboGaConfig {
  int population = 64;  // even, >= 2
  int generations = 50;
};

struct QuboGaResult {
  std::vector<BitString> population;  // final generation, best first
  std::vector<std::int64_t> objectives;
  std::vector<std::int64_t> best_per_generation;  // index 0 = initial population
};

// Minimizes x^T Q x with a fitness-proportional GA: n/2 pairs per generation,
// uniform crossover, one random bit flip per child, merge and keep the n best
// distinct individuals (duplicates only fill up a short population).
// Selection weight of x is (max objective - objective(x)) + 1.
template <class Objective>
QuboGaResult qubo_ga(const Objective& q, const QuboGaConfig& config, Rng& rng);

// Q_B = A^T A - 2 diag(beta^T A): x^T Q_B x + beta^T beta = |A x - beta|^2.
QuboMatrix build_equality_qubo(const ConstraintSystem& cs, std::array<std::int64_t, 2> beta);
FactoredQubo equality_qubo_factored(const ConstraintSystem& cs,
                                    std::array<std::int64_t, 2> beta);

// Five evenly spaced values per budget axis, 0 and b included (up to 25).
std::vector<std::array<std::int64_t, 2>> beta_grid(const ConstraintSystem& cs, int per_axis = 5);

struct InequalityConfig {
  std::size_t subspace_size = 64;
  std::size_t draws_per_beta = 0;  // 0: ceil(M / m) * 4
  QuboGaConfig ga;
};

// Samples binary solutions of A x <= b: for every beta, QUBO GAs on random
// index subsets, lifted by zero fill and filtered by A x <= b. The zero
// chromosome is always part of the (sorted, duplicate free) result.
std::vector<Chromosome> solve_inequality_system(const ConstraintSystem& cs,
                                                const std::vector<std::array<std::int64_t, 2>>& betas,
                                                const InequalityConfig& config, Rng& rng);

// Mutation vector in {-1, 0, +1}^M.
struct TernaryVector {
  std::vector<std::int8_t> values;

  std::size_t size() const noexcept { return values.size(); }
  std::size_t nonzeros() const noexcept;
  TernaryVector negated() const;

  friend bool operator==(const TernaryVector&, const TernaryVector&) = default;
  friend auto operator<=>(const TernaryVector&, const TernaryVector&) = default;
};

// x_i = -1 + b_{i,1} + 2 b_{i,2}; canonical bits (0,0), (1,0), (0,1).
BitString encode_ternary(std::span<const int> x);
std::vector<int> decode_ternary(std::span<const std::uint8_t> bits);

// |A m|^2.
std::int64_t kernel_norm(const ConstraintSystem& cs, const TernaryVector& m);

// Q_B = E^T Q_I E + 2 diag(L^T Q_I E), Q_I = A^T A, E = I_M (x) [1, 2], L = -1:
// X^T Q_B X + L^T Q_I L = |A (L + E X)|^2.
QuboMatrix build_kernel_qubo(const ConstraintSystem& cs);
FactoredQubo kernel_qubo_factored(const ConstraintSystem& cs);
std::int64_t kernel_qubo_constant(const ConstraintSystem& cs);  // L^T Q_I L

struct KernelConfig {
  std::size_t subspace_size = 6;  // ternary slots per QUBO
  std::size_t draws = 0;           // 0: ceil(M / m) * 4
  std::size_t max_candidates = 512;
  QuboGaConfig ga;
};

// Approximate kernel of A over {-1,0,+1}^M: decoded QUBO GA samples (slots
// outside the subspace are 0), closed under negation, zero vector removed,
// sorted by |A m|^2 then sparsity. Falls back to the unit moves +-e_i when
// nothing survives.
std::vector<TernaryVector> approximate_kernel(const ConstraintSystem& cs,
                                              const KernelConfig& config, Rng& rng);

}  // namespace rulex
