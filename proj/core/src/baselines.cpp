#include "rulex/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "rulex/errors.hpp"
#include "sampling.hpp"

namespace rulex {

std::vector<std::size_t> forexpp(const std::vector<RuleStats>& stats,
                                 const std::vector<int>& rule_classes,
                                 std::size_t num_instances) {
  std::set<int> classes(rule_classes.begin(), rule_classes.end());
  const double n = static_cast<double>(num_instances);
  auto accuracy = [&](std::size_t i) {
    const int cov = stats[i].coverage();
    return cov > 0 ? static_cast<double>(stats[i].cc) / cov : 0.0;
  };
  std::vector<std::size_t> out;
  for (int c : classes) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < stats.size(); ++i)
      if (rule_classes[i] == c) members.push_back(i);
    double acc = 0, cov = 0, len = 0;
    for (auto i : members) {
      acc += accuracy(i);
      cov += stats[i].coverage() / n;
      len += stats[i].length;
    }
    const double k = static_cast<double>(members.size());
    acc /= k;
    cov /= k;
    len /= k;
    for (auto i : members)
      if (accuracy(i) > acc && stats[i].coverage() / n > cov && stats[i].length < len)
        out.push_back(i);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> forexpp(const std::vector<Rule>& rules, const Dataset& data) {
  std::vector<RuleStats> stats;
  std::vector<int> classes;
  for (const auto& r : rules) {
    stats.push_back(rule_stats(r, data));
    classes.push_back(r.predicted_class);
  }
  return forexpp(stats, classes, data.num_instances());
}

double rule_score(int cc, int ic, int rl) {
  if (cc + ic == 0) return -1.0;
  const double c = cc, i = ic;
  const double l = std::max(rl, 1);
  return (c - i) / (c + i) + c / (i + kRuleScoreK) + c / l;
}

double rule_score(const RuleStats& stats) { return rule_score(stats.cc, stats.ic, stats.length); }

RfHcResult rf_hc(const Problem& p, const RfHcConfig& config, Rng& rng) {
  const std::size_t m = p.num_rules();
  std::vector<double> weight(m);
  for (std::size_t i = 0; i < m; ++i) {
    const int cov = static_cast<int>(p.coverage(i).count());
    weight[i] = rule_score(cov - p.errors(i), p.errors(i), p.length(i));
  }
  const double lowest = *std::min_element(weight.begin(), weight.end());
  for (auto& w : weight) w = w - lowest + 1e-6;

  RfHcResult result;
  result.best = Chromosome(m);
  result.best_fitness = 0.0;
  std::vector<std::pair<double, std::size_t>> keys(m);
  for (int trial = 0; trial < std::max(config.trials, 1); ++trial) {
    // Weighted sampling without replacement: sort by u^(1/w) descending.
    for (std::size_t i = 0; i < m; ++i) {
      double u = uniform01(rng);
      if (u <= 0.0) u = std::numeric_limits<double>::min();
      keys[i] = {std::log(u) / weight[i], i};
    }
    std::sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) {
      return a.first > b.first || (a.first == b.first && a.second < b.second);
    });

    Chromosome x(m);
    std::vector<std::size_t> selected;
    Bitset covered(p.num_instances());
    int complexity = 0, errors = 0, n_covered = 0;
    std::int64_t conflicts = 0;
    double f = 0.0;
    for (const auto& [key, i] : keys) {
      if (complexity + p.length(i) > p.budgets().complexity ||
          errors + p.errors(i) > p.budgets().errors)
        continue;
      Bitset next = covered;
      next |= p.coverage(i);
      const int next_covered = static_cast<int>(next.count());
      std::int64_t next_conflicts = conflicts;
      for (auto k : selected) next_conflicts += 2 * static_cast<std::int64_t>(p.conflict(i, k));
      const double next_f = combine_fitness(next_covered, next_conflicts, p.epsilon());
      if (next_f <= f) continue;
      x.set(i, true);
      selected.push_back(i);
      covered = std::move(next);
      n_covered = next_covered;
      conflicts = next_conflicts;
      complexity += p.length(i);
      errors += p.errors(i);
      f = next_f;
    }
    (void)n_covered;
    if (f > result.best_fitness) {
      result.best_fitness = f;
      result.best = x;
    }
    result.trial_solutions.push_back(std::move(x));
    result.trial_additions.push_back(std::move(selected));
  }
  return result;
}

std::vector<int> nondominated_ranks(const std::vector<Objectives>& points) {
  const std::size_t n = points.size();
  auto dominates = [](const Objectives& a, const Objectives& b) {
    const bool no_worse = a.fitness >= b.fitness && a.complexity <= b.complexity &&
                          a.errors <= b.errors;
    const bool better = a.fitness > b.fitness || a.complexity < b.complexity ||
                        a.errors < b.errors;
    return no_worse && better;
  };
  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<int> dom_count(n, 0), rank(n, 0);
  std::vector<std::size_t> front;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (i == k) continue;
      if (dominates(points[i], points[k]))
        dominated[i].push_back(k);
      else if (dominates(points[k], points[i]))
        ++dom_count[i];
    }
    if (dom_count[i] == 0) front.push_back(i);
  }
  int level = 0;
  while (!front.empty()) {
    std::vector<std::size_t> next;
    for (auto i : front) {
      rank[i] = level;
      for (auto k : dominated[i])
        if (--dom_count[k] == 0) next.push_back(k);
    }
    front = std::move(next);
    ++level;
  }
  return rank;
}

namespace {

Objectives objectives_of(const Problem& p, const Chromosome& c) {
  const auto ev = fitness(p, c);
  return {ev.fitness, ev.complexity, ev.errors};
}

void rank_and_truncate(std::vector<IrfreIndividual>& pop, std::size_t cap) {
  std::vector<Objectives> pts;
  pts.reserve(pop.size());
  for (const auto& ind : pop) pts.push_back(ind.objectives);
  const auto ranks = nondominated_ranks(pts);
  for (std::size_t k = 0; k < pop.size(); ++k) pop[k].rank = ranks[k];
  std::stable_sort(pop.begin(), pop.end(), [](const auto& a, const auto& b) {
    if (a.rank != b.rank) return a.rank < b.rank;
    return a.objectives.fitness > b.objectives.fitness;
  });
  if (pop.size() > cap) pop.resize(cap);
}

}  // namespace

IrfreResult irfre(const Problem& p, const IrfreConfig& config, Rng& rng,
                  const std::vector<Chromosome>& seeds) {
  const std::size_t m = p.num_rules();
  const auto cap = static_cast<std::size_t>(std::max(config.max_population, 2));

  long total_length = 0;
  for (std::size_t i = 0; i < m; ++i) total_length += p.length(i);
  const double density =
      total_length > 0
          ? std::clamp(p.budgets().complexity / (2.0 * static_cast<double>(total_length)), 0.0, 1.0)
          : 0.5;

  std::vector<IrfreIndividual> pop;
  std::set<Chromosome> seen;
  for (int attempt = 0; attempt < config.init_attempts && pop.size() < cap; ++attempt) {
    Chromosome c(m);
    for (std::size_t i = 0; i < m; ++i) c.set(i, uniform01(rng) < density);
    if (!feasible(p, c) || !seen.insert(c).second) continue;
    pop.push_back({c, objectives_of(p, c), 0});
  }
  for (const auto& s : seeds) {
    if (s.size() != m || !feasible(p, s) || !seen.insert(s).second) continue;
    pop.push_back({s, objectives_of(p, s), 0});
  }
  if (pop.empty()) throw InitializationError("IRFRE: no feasible initial individual");
  rank_and_truncate(pop, std::max(cap, pop.size()));

  std::bernoulli_distribution coin(0.5);
  const double flip = m > 0 ? 1.0 / static_cast<double>(m) : 0.0;
  int gen = 0;
  for (; gen < config.generations; ++gen) {
    const std::size_t n = pop.size();
    if (n < 2) break;
    int worst = 0;
    for (const auto& ind : pop) worst = std::max(worst, ind.rank);
    std::vector<double> weight(n);
    for (std::size_t k = 0; k < n; ++k) weight[k] = static_cast<double>(worst - pop[k].rank + 1);

    std::vector<IrfreIndividual> children;
    for (std::size_t pair = 0; pair < n / 2; ++pair) {
      const auto a = detail::sample_weighted(weight, rng);
      const auto b = detail::sample_weighted(weight, rng, a);
      Chromosome c1(m), c2(m);
      for (std::size_t i = 0; i < m; ++i) {
        const bool swap = coin(rng);
        c1.set(i, swap ? pop[b].chromosome[i] : pop[a].chromosome[i]);
        c2.set(i, swap ? pop[a].chromosome[i] : pop[b].chromosome[i]);
      }
      for (auto* c : {&c1, &c2}) {
        for (std::size_t i = 0; i < m; ++i)
          if (uniform01(rng) < flip) c->flip(i);
        if (feasible(p, *c)) children.push_back({*c, objectives_of(p, *c), 0});
      }
    }
    for (auto& c : children) pop.push_back(std::move(c));
    rank_and_truncate(pop, cap);
    for (const auto& ind : pop)
      if (!feasible(p, ind.chromosome))
        throw InvariantViolation("IRFRE population holds an infeasible individual");
  }

  std::size_t best = 0;
  for (std::size_t k = 1; k < pop.size(); ++k)
    if (pop[k].objectives.fitness > pop[best].objectives.fitness) best = k;
  IrfreResult result;
  result.best = pop[best].chromosome;
  result.evaluation = fitness(p, result.best);
  result.population = std::move(pop);
  result.generations = gen;
  return result;
}

}  // namespace rulex
