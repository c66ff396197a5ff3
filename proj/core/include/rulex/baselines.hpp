#pragma once

#include <cstddef>
#include <vector>

#include "rulex/dataset.hpp"
#include "rulex/problem.hpp"
#include "rulex/rng.hpp"
#include "rulex/rules.hpp"

namespace rulex {

// ForEx++: per class, the rules whose accuracy and coverage are strictly
// above the class average and whose length is strictly below it; returns the
// union over classes as ascending rule indices.
std::vector<std::size_t> forexpp(const std::vector<Rule>& rules, const Dataset& data);
std::vector<std::size_t> forexpp(const std::vector<RuleStats>& stats,
                                 const std::vector<int>& rule_classes,
                                 std::size_t num_instances);

inline constexpr double kRuleScoreK = 4.0;

// (cc - ic)/(cc + ic) + cc/(ic + k) + cc/rl with k = 4. A rule covering
// nothing scores -1; a condition-free rule counts as length 1.
double rule_score(int cc, int ic, int rl);
double rule_score(const RuleStats& stats);

struct RfHcConfig {
  int trials = 30;
};

struct RfHcResult {
  Chromosome best;
  double best_fitness = 0.0;
  std::vector<Chromosome> trial_solutions;
  // Accepted rule indices per trial, in acceptance order.
  std::vector<std::vector<std::size_t>> trial_additions;
};

// Adapted RF+HC. Each trial visits the rules in a random order drawn without
// replacement with probability proportional to score - min(score) + 1e-6 and
// adds a rule iff it keeps both budgets and strictly increases f*. Returns the
// best trial (the empty selection unless some trial beats f* = 0).
RfHcResult rf_hc(const Problem& p, const RfHcConfig& config, Rng& rng);

struct Objectives {
  double fitness = 0.0;
  int complexity = 0;
  int errors = 0;
};

// Nondomination front index per point (0 = Pareto front) for maximizing
// fitness and minimizing complexity and errors.
std::vector<int> nondominated_ranks(const std::vector<Objectives>& points);

struct IrfreConfig {
  int generations = 100;
  int max_population = 50;
  int init_attempts = 10000;
};

struct IrfreIndividual {
  Chromosome chromosome;
  Objectives objectives;
  int rank = 0;
};

struct IrfreResult {
  Chromosome best;
  Evaluation evaluation;
  std::vector<IrfreIndividual> population;  // final generation
  int generations = 0;
};

// Adapted IRFRE: feasible random initial population (each bit set with
// probability B_c / (2 sum L), rejection sampled) plus `seeds`; per
// generation, rank-weighted mating, uniform crossover, 1/M bit-flip mutation,
// feasible children only, truncation by (rank, f*). Returns the best f*.
// Throws InitializationError when no feasible individual is available.
IrfreResult irfre(const Problem& p, const IrfreConfig& config, Rng& rng,
                  const std::vector<Chromosome>& seeds = {});

}  // namespace rulex
