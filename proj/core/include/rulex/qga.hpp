#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rulex/problem.hpp"
#include "rulex/qubo.hpp"
#include "rulex/rng.hpp"

namespace rulex {

enum class CrossoverKind { one_point, two_point, uniform };

std::string to_string(CrossoverKind kind);
CrossoverKind parse_crossover(const std::string& name);

// One-point swaps the suffix after a cut in [1, M-1], two-point swaps the
// segment between two distinct cuts in [0, M], uniform takes each bit from
// either parent with probability 0.5. Point crossovers with M < 2 return
// the parents.
std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b,
                                            CrossoverKind kind, Rng& rng);
std::pair<Chromosome, Chromosome> one_point_crossover(const Chromosome& a, const Chromosome& b,
                                                      std::size_t cut);

// (r + m) clipped to {0, 1} componentwise.
Chromosome apply_mutation(const Chromosome& r, const TernaryVector& m);

// Mutation list kept as sparse (index, sign) moves for fast scanning.
class MutationSet {
 public:
  MutationSet() = default;
  explicit MutationSet(const std::vector<TernaryVector>& mutations);

  std::size_t size() const noexcept { return moves_.size(); }
  bool empty() const noexcept { return moves_.empty(); }
  const std::vector<std::pair<std::uint32_t, std::int8_t>>& moves(std::size_t k) const {
    return moves_[k];
  }

 private:
  std::vector<std::vector<std::pair<std::uint32_t, std::int8_t>>> moves_;
};

// Applies the first mutation (in list order) that keeps r feasible and
// strictly increases f*, repeatedly, until none qualifies. `steps` receives
// the number of applied mutations.
Chromosome super_mutation(const Problem& p, const Chromosome& r, const MutationSet& mutations,
                          int* steps = nullptr);
Chromosome super_mutation(const Problem& p, const Chromosome& r,
                          const std::vector<TernaryVector>& mutations, int* steps = nullptr);

struct QgaConfig {
  int generations = 100;
  int max_population = 50;  // even, >= 2
  CrossoverKind crossover = CrossoverKind::uniform;
  int crossover_retries = 50;
  bool seed_rf_hc = true;
  int rf_hc_trials = 30;
  std::uint64_t seed = 0;
  InequalityConfig inequality;
  KernelConfig kernel;
};

struct GenerationTrace {
  int generation = 0;  // 0 = initial population
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
  int diversity = 0;  // distinct chromosomes
};

enum class StopReason { generation_cap, converged, full_coverage, population_too_small };
std::string to_string(StopReason reason);

struct Solution {
  Chromosome chromosome;
  Evaluation evaluation;
  std::vector<Rule> rules;  // selected rules when the problem carries them
  std::vector<GenerationTrace> trace;
  StopReason stop_reason = StopReason::generation_cap;
  double seconds = 0.0;
  std::size_t initial_population = 0;
  std::size_t mutation_count = 0;
};

// Nested genetic algorithm. Throws InitializationError on an empty initial
// population and InvariantViolation if an infeasible individual ever appears.
Solution qga_run(const Problem& p, const QgaConfig& config);

std::string trace_to_csv(const std::vector<GenerationTrace>& trace);

}  // namespace rulex
