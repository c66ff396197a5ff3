#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rulex/bitset.hpp"
#include "rulex/dataset.hpp"
#include "rulex/rules.hpp"

namespace rulex {

struct Budgets {
  int complexity = 0;  // B_c
  int errors = 0;      // B_e

  friend bool operator==(const Budgets&, const Budgets&) = default;
};

// B_e = round(fraction * N), halves rounded up.
int error_budget_from_fraction(double fraction, std::size_t num_instances);

// Selection vector over the rule pool.
class Chromosome {
 public:
  Chromosome() = default;
  explicit Chromosome(std::size_t size) : bits_(size, 0) {}
  explicit Chromosome(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {}
  static Chromosome from_string(const std::string& bits);  // "0110"

  std::size_t size() const noexcept { return bits_.size(); }
  bool operator[](std::size_t i) const noexcept { return bits_[i] != 0; }
  void set(std::size_t i, bool on) noexcept { bits_[i] = on ? 1 : 0; }
  void flip(std::size_t i) noexcept { bits_[i] ^= 1; }

  std::vector<std::size_t> selected() const;
  std::size_t count() const noexcept;
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  std::string to_string() const;

  friend bool operator==(const Chromosome&, const Chromosome&) = default;
  friend auto operator<=>(const Chromosome&, const Chromosome&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

struct Evaluation {
  double fitness = 0.0;          // f* = covered - (epsilon / 2) * conflicts
  int covered = 0;               // number of j with (E r)_j >= 1
  std::int64_t conflicts = 0;    // r^T Q r
  double conflict_penalty = 0.0; // (epsilon / 2) * conflicts
  int complexity = 0;            // L(r)
  int errors = 0;                // E(r)
  double coverage_score = 0.0;   // f* / N
};

// Two-row integer system A x <= b with A = [lengths; errors], b = budgets.
struct ConstraintSystem {
  std::vector<std::int64_t> lengths;
  std::vector<std::int64_t> errors;
  std::int64_t complexity_budget = 0;
  std::int64_t error_budget = 0;

  std::size_t size() const noexcept { return lengths.size(); }
  std::int64_t at(int row, std::size_t i) const noexcept {
    return row == 0 ? lengths[i] : errors[i];
  }
  std::int64_t bound(int row) const noexcept {
    return row == 0 ? complexity_budget : error_budget;
  }
  bool satisfied_by(std::span<const std::uint8_t> x) const noexcept;
};

// Budgeted maximum coverage instance. Immutable after construction.
class Problem {
 public:
  // Low-level constructor: per-rule coverage sets over `num_instances`
  // instances with their labels, predicted classes, lengths and errors.
  Problem(std::vector<Bitset> coverage, std::vector<int> rule_classes,
          std::vector<int> lengths, std::vector<int> errors,
          std::size_t num_instances, Budgets budgets, double epsilon);

  std::size_t num_rules() const noexcept { return coverage_.size(); }
  std::size_t num_instances() const noexcept { return num_instances_; }
  const Budgets& budgets() const noexcept { return budgets_; }
  double epsilon() const noexcept { return epsilon_; }

  // Column i of E: instances covered by rule i.
  const Bitset& coverage(std::size_t i) const noexcept { return coverage_[i]; }
  bool covers(std::size_t j, std::size_t i) const noexcept { return coverage_[i].test(j); }
  std::int32_t conflict(std::size_t i, std::size_t k) const noexcept {
    return conflict_[i * num_rules() + k];
  }
  int rule_class(std::size_t i) const noexcept { return rule_classes_[i]; }
  int length(std::size_t i) const noexcept { return lengths_[i]; }
  int errors(std::size_t i) const noexcept { return errors_[i]; }
  const std::vector<int>& lengths() const noexcept { return lengths_; }
  const std::vector<int>& errors() const noexcept { return errors_; }

  // Rules the instance was built from; empty for low-level instances.
  const std::vector<Rule>& rules() const noexcept { return rules_; }
  void attach_rules(std::vector<Rule> rules);

  ConstraintSystem constraints() const;
  Problem with_budgets(Budgets budgets) const;
  Problem with_epsilon(double epsilon) const;

 private:
  std::vector<Bitset> coverage_;
  std::vector<int> rule_classes_;
  std::vector<int> lengths_;
  std::vector<int> errors_;
  std::vector<std::int32_t> conflict_;  // M x M, symmetric, zero diagonal
  std::vector<Rule> rules_;
  std::size_t num_instances_ = 0;
  Budgets budgets_;
  double epsilon_ = 0.0;
};

// Computes E, Q^alpha, L and E(R_i) for deduplicated rules on `data`.
Problem build_problem(const std::vector<Rule>& rules, const Dataset& data,
                      double epsilon, Budgets budgets);

// f* via sign(E r) and r^T Q r over the selected rules.
Evaluation fitness(const Problem& p, const Chromosome& r);
Evaluation fitness(const Problem& p, std::span<const std::size_t> selected);
bool feasible(const Problem& p, const Chromosome& r);

// Fitness combination shared by every evaluator so that equal (covered,
// conflicts) pairs give bit-identical fitness values.
inline double combine_fitness(int covered, std::int64_t conflicts, double epsilon) noexcept {
  return static_cast<double>(covered) - 0.5 * epsilon * static_cast<double>(conflicts);
}

struct Optimum {
  Chromosome chromosome;
  Evaluation evaluation;
};

// Exhaustive search over all 2^M chromosomes (M <= 22). Ties prefer smaller
// complexity, then the lexicographically smaller bit string.
Optimum brute_force_optimum(const Problem& p);
inline constexpr std::size_t kBruteForceLimit = 22;

// Reproducible bundle: rules, budgets and epsilon. Matrices are recomputed on
// load against the dataset.
nlohmann::json problem_to_json(const Problem& p);
Problem problem_from_json(const nlohmann::json& j, const Dataset& data);

nlohmann::json rule_to_json(const Rule& r);
Rule rule_from_json(const nlohmann::json& j);

}  // namespace rulex
