#include "rulex/qga.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <set>
#include <sstream>

#include "rulex/baselines.hpp"
#include "rulex/errors.hpp"
#include "sampling.hpp"

namespace rulex {

std::string to_string(CrossoverKind kind) {
  switch (kind) {
    case CrossoverKind::one_point: return "one_point";
    case CrossoverKind::two_point: return "two_point";
    case CrossoverKind::uniform: return "uniform";
  }
  return "uniform";
}

CrossoverKind parse_crossover(const std::string& name) {
  if (name == "one_point" || name == "one-point") return CrossoverKind::one_point;
  if (name == "two_point" || name == "two-point") return CrossoverKind::two_point;
  if (name == "uniform") return CrossoverKind::uniform;
  throw DomainError("unknown crossover kind: " + name);
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::generation_cap: return "generation_cap";
    case StopReason::converged: return "converged";
    case StopReason::full_coverage: return "full_coverage";
    case StopReason::population_too_small: return "population_too_small";
  }
  return "generation_cap";
}

std::pair<Chromosome, Chromosome> one_point_crossover(const Chromosome& a, const Chromosome& b,
                                                      std::size_t cut) {
  Chromosome c1 = a, c2 = b;
  for (std::size_t i = cut; i < a.size(); ++i) {
    c1.set(i, b[i]);
    c2.set(i, a[i]);
  }
  return {std::move(c1), std::move(c2)};
}

std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b,
                                            CrossoverKind kind, Rng& rng) {
  if (a.size() != b.size()) throw DomainError("crossover: parent lengths differ");
  const std::size_t m = a.size();
  switch (kind) {
    case CrossoverKind::one_point: {
      if (m < 2) return {a, b};
      std::uniform_int_distribution<std::size_t> cut(1, m - 1);
      return one_point_crossover(a, b, cut(rng));
    }
    case CrossoverKind::two_point: {
      if (m < 2) return {a, b};
      std::uniform_int_distribution<std::size_t> pos(0, m);
      std::size_t lo = pos(rng), hi = pos(rng);
      while (hi == lo) hi = pos(rng);
      if (lo > hi) std::swap(lo, hi);
      Chromosome c1 = a, c2 = b;
      for (std::size_t i = lo; i < hi; ++i) {
        c1.set(i, b[i]);
        c2.set(i, a[i]);
      }
      return {std::move(c1), std::move(c2)};
    }
    case CrossoverKind::uniform: {
      std::bernoulli_distribution coin(0.5);
      Chromosome c1 = a, c2 = b;
      for (std::size_t i = 0; i < m; ++i)
        if (coin(rng)) {
          c1.set(i, b[i]);
          c2.set(i, a[i]);
        }
      return {std::move(c1), std::move(c2)};
    }
  }
  return {a, b};
}

Chromosome apply_mutation(const Chromosome& r, const TernaryVector& m) {
  if (r.size() != m.size()) throw DomainError("apply_mutation: length mismatch");
  Chromosome out = r;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const int v = std::clamp(static_cast<int>(r[i]) + m.values[i], 0, 1);
    out.set(i, v == 1);
  }
  return out;
}

MutationSet::MutationSet(const std::vector<TernaryVector>& mutations) {
  moves_.reserve(mutations.size());
  for (const auto& m : mutations) {
    std::vector<std::pair<std::uint32_t, std::int8_t>> mv;
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m.values[i] != 0) mv.emplace_back(static_cast<std::uint32_t>(i), m.values[i]);
    moves_.push_back(std::move(mv));
  }
}

namespace {

// Incremental evaluation state for one chromosome.
class Climber {
 public:
  Climber(const Problem& p, const std::vector<std::vector<std::uint32_t>>& covers,
          const Chromosome& r)
      : p_(p), covers_(covers), bits_(r), count_(p.num_instances(), 0) {
    for (auto i : r.selected()) add(i);
  }

  double fitness() const { return combine_fitness(covered_, conflicts_, p_.epsilon()); }
  const Chromosome& chromosome() const { return bits_; }

  // Applies `moves` if the result is feasible with strictly larger f*.
  bool try_apply(const std::vector<std::pair<std::uint32_t, std::int8_t>>& moves) {
    changes_.clear();
    long complexity = complexity_, errors = errors_;
    for (const auto& [i, s] : moves) {
      if (s > 0 && !bits_[i]) {
        changes_.push_back({i, true});
        complexity += p_.length(i);
        errors += p_.errors(i);
      } else if (s < 0 && bits_[i]) {
        changes_.push_back({i, false});
        complexity -= p_.length(i);
        errors -= p_.errors(i);
      }
    }
    if (changes_.empty()) return false;
    if (complexity > p_.budgets().complexity || errors > p_.budgets().errors) return false;
    const double before = fitness();
    for (const auto& [i, on] : changes_) on ? add(i) : remove(i);
    if (fitness() > before) return true;
    for (auto it = changes_.rbegin(); it != changes_.rend(); ++it)
      it->second ? remove(it->first) : add(it->first);
    return false;
  }

 private:
  void add(std::size_t i) {
    for (auto j : covers_[i])
      if (count_[j]++ == 0) ++covered_;
    std::int64_t c = 0;
    for (std::size_t k = 0; k < bits_.size(); ++k)
      if (bits_[k] && k != i) c += p_.conflict(i, k);
    conflicts_ += 2 * c;
    bits_.set(i, true);
    complexity_ += p_.length(i);
    errors_ += p_.errors(i);
  }

  void remove(std::size_t i) {
    for (auto j : covers_[i])
      if (--count_[j] == 0) --covered_;
    bits_.set(i, false);
    std::int64_t c = 0;
    for (std::size_t k = 0; k < bits_.size(); ++k)
      if (bits_[k]) c += p_.conflict(i, k);
    conflicts_ -= 2 * c;
    complexity_ -= p_.length(i);
    errors_ -= p_.errors(i);
  }

  const Problem& p_;
  const std::vector<std::vector<std::uint32_t>>& covers_;
  Chromosome bits_;
  std::vector<int> count_;
  int covered_ = 0;
  std::int64_t conflicts_ = 0;
  long complexity_ = 0;
  long errors_ = 0;
  std::vector<std::pair<std::uint32_t, bool>> changes_;
};

std::vector<std::vector<std::uint32_t>> cover_lists(const Problem& p) {
  std::vector<std::vector<std::uint32_t>> out(p.num_rules());
  for (std::size_t i = 0; i < p.num_rules(); ++i)
    for (auto j : p.coverage(i).indices()) out[i].push_back(static_cast<std::uint32_t>(j));
  return out;
}

Chromosome climb(const Problem& p, const std::vector<std::vector<std::uint32_t>>& covers,
                 const Chromosome& r, const MutationSet& mutations, int* steps) {
  Climber state(p, covers, r);
  int applied = 0;
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t k = 0; k < mutations.size(); ++k)
      if (state.try_apply(mutations.moves(k))) {
        ++applied;
        improved = true;
        break;
      }
  }
  if (steps) *steps = applied;
  return state.chromosome();
}

struct Individual {
  Chromosome chromosome;
  Evaluation evaluation;
};

void sort_by_fitness(std::vector<Individual>& pop) {
  std::stable_sort(pop.begin(), pop.end(), [](const Individual& a, const Individual& b) {
    return a.evaluation.fitness > b.evaluation.fitness;
  });
}

GenerationTrace summarize(const std::vector<Individual>& pop, int generation) {
  GenerationTrace t;
  t.generation = generation;
  t.min = pop.front().evaluation.fitness;
  t.max = pop.front().evaluation.fitness;
  double sum = 0.0;
  std::set<Chromosome> distinct;
  for (const auto& ind : pop) {
    t.min = std::min(t.min, ind.evaluation.fitness);
    t.max = std::max(t.max, ind.evaluation.fitness);
    sum += ind.evaluation.fitness;
    distinct.insert(ind.chromosome);
  }
  t.mean = std::clamp(sum / static_cast<double>(pop.size()), t.min, t.max);
  t.diversity = static_cast<int>(distinct.size());
  return t;
}

bool perfect(const Evaluation& e, std::size_t n) {
  return static_cast<std::size_t>(e.covered) == n && e.conflicts == 0;
}

void check_feasible(const Problem& p, const std::vector<Individual>& pop) {
  for (const auto& ind : pop)
    if (!feasible(p, ind.chromosome))
      throw InvariantViolation("QGA population holds an infeasible individual");
}

}  // namespace

Chromosome super_mutation(const Problem& p, const Chromosome& r, const MutationSet& mutations,
                          int* steps) {
  if (r.size() != p.num_rules()) throw DomainError("super_mutation: length mismatch");
  return climb(p, cover_lists(p), r, mutations, steps);
}

Chromosome super_mutation(const Problem& p, const Chromosome& r,
                          const std::vector<TernaryVector>& mutations, int* steps) {
  return super_mutation(p, r, MutationSet(mutations), steps);
}

Solution qga_run(const Problem& p, const QgaConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t m = p.num_rules();
  const std::size_t n_max = static_cast<std::size_t>(std::max(config.max_population, 2));
  const auto cs = p.constraints();
  const auto covers = cover_lists(p);

  // Initial population from the inequality solver, optionally RF+HC seeded.
  Rng init_rng(derive_seed(config.seed, 1));
  std::vector<Chromosome> candidates =
      solve_inequality_system(cs, beta_grid(cs), config.inequality, init_rng);
  if (config.seed_rf_hc) {
    Rng hc_rng(config.seed);
    auto hc = rf_hc(p, RfHcConfig{config.rf_hc_trials}, hc_rng);
    for (auto& c : hc.trial_solutions) candidates.push_back(std::move(c));
  }
  std::set<Chromosome> seen;
  std::vector<Individual> pop;
  for (auto& c : candidates) {
    if (c.size() != m || !feasible(p, c) || !seen.insert(c).second) continue;
    auto ev = fitness(p, c);
    pop.push_back({std::move(c), ev});
  }
  if (pop.empty()) throw InitializationError("QGA: empty initial population");
  sort_by_fitness(pop);
  if (pop.size() > n_max) pop.resize(n_max);

  Rng kernel_rng(derive_seed(config.seed, 2));
  const MutationSet mutations(approximate_kernel(cs, config.kernel, kernel_rng));

  Solution sol;
  sol.initial_population = pop.size();
  sol.mutation_count = mutations.size();
  sol.trace.push_back(summarize(pop, 0));

  Rng rng(derive_seed(config.seed, 3));
  const std::size_t n_instances = p.num_instances();
  int gen = 0;
  for (;;) {
    const auto& last = sol.trace.back();
    if (pop.size() < 2) {
      sol.stop_reason = StopReason::population_too_small;
      break;
    }
    if (perfect(pop.front().evaluation, n_instances)) {
      sol.stop_reason = StopReason::full_coverage;
      break;
    }
    if (last.min == last.max) {
      sol.stop_reason = StopReason::converged;
      break;
    }
    if (gen >= config.generations) {
      sol.stop_reason = StopReason::generation_cap;
      break;
    }
    ++gen;

    const std::size_t n = pop.size();
    std::vector<double> weight(n);
    for (std::size_t k = 0; k < n; ++k)
      weight[k] = pop[k].evaluation.fitness - last.min + 1e-6;

    std::vector<Individual> children;
    children.reserve(n);
    for (std::size_t pair = 0; pair < n / 2; ++pair) {
      const auto a = detail::sample_weighted(weight, rng);
      const auto b = detail::sample_weighted(weight, rng, a);
      const auto& pa = pop[a].chromosome;
      const auto& pb = pop[b].chromosome;
      Chromosome c1 = pa, c2 = pb;
      bool ok1 = false, ok2 = false;
      for (int attempt = 0; attempt < std::max(config.crossover_retries, 1); ++attempt) {
        auto [x, y] = crossover(pa, pb, config.crossover, rng);
        ok1 = feasible(p, x);
        ok2 = feasible(p, y);
        if (ok1 && ok2) {
          c1 = std::move(x);
          c2 = std::move(y);
          break;
        }
      }
      if (!(ok1 && ok2)) {
        c1 = pa;
        c2 = pb;
      }
      for (auto* c : {&c1, &c2}) {
        Chromosome mutated = climb(p, covers, *c, mutations, nullptr);
        auto ev = fitness(p, mutated);
        children.push_back({std::move(mutated), ev});
      }
    }
    for (auto& c : children) pop.push_back(std::move(c));
    sort_by_fitness(pop);
    if (pop.size() > n_max) pop.resize(n_max);
    check_feasible(p, pop);
    sol.trace.push_back(summarize(pop, gen));
  }

  sol.chromosome = pop.front().chromosome;
  sol.evaluation = pop.front().evaluation;
  if (!p.rules().empty())
    for (auto i : sol.chromosome.selected()) sol.rules.push_back(p.rules()[i]);
  sol.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return sol;
}

std::string trace_to_csv(const std::vector<GenerationTrace>& trace) {
  std::ostringstream out;
  out << "generation,min,mean,max,diversity\n";
  char buf[160];
  for (const auto& t : trace) {
    std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f,%.6f,%d\n", t.generation, t.min, t.mean, t.max,
                  t.diversity);
    out << buf;
  }
  return out.str();
}

}  // namespace rulex
