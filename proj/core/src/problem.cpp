#include "rulex/problem.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

#include "rulex/errors.hpp"

namespace rulex {

int error_budget_from_fraction(double fraction, std::size_t num_instances) {
  if (fraction < 0) throw DomainError("error fraction must be >= 0");
  return static_cast<int>(std::floor(fraction * static_cast<double>(num_instances) + 0.5));
}

Chromosome Chromosome::from_string(const std::string& bits) {
  Chromosome c(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != '0' && bits[i] != '1') throw Error("bad chromosome string");
    c.set(i, bits[i] == '1');
  }
  return c;
}

std::vector<std::size_t> Chromosome::selected() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) out.push_back(i);
  return out;
}

std::size_t Chromosome::count() const noexcept {
  std::size_t n = 0;
  for (auto b : bits_) n += b;
  return n;
}

std::string Chromosome::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

bool ConstraintSystem::satisfied_by(std::span<const std::uint8_t> x) const noexcept {
  std::int64_t l = 0, e = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!x[i]) continue;
    l += lengths[i];
    e += errors[i];
  }
  return l <= complexity_budget && e <= error_budget;
}

Problem::Problem(std::vector<Bitset> coverage, std::vector<int> rule_classes,
                 std::vector<int> lengths, std::vector<int> errors,
                 std::size_t num_instances, Budgets budgets, double epsilon)
    : coverage_(std::move(coverage)),
      rule_classes_(std::move(rule_classes)),
      lengths_(std::move(lengths)),
      errors_(std::move(errors)),
      num_instances_(num_instances),
      budgets_(budgets),
      epsilon_(epsilon) {
  const std::size_t m = coverage_.size();
  if (m == 0) throw DegenerateProblemError("empty rule pool");
  if (rule_classes_.size() != m || lengths_.size() != m || errors_.size() != m)
    throw DegenerateProblemError("rule attribute vectors have inconsistent sizes");
  if (budgets_.complexity < 0 || budgets_.errors < 0)
    throw DomainError("budgets must be >= 0");
  if (epsilon_ < 0) throw DomainError("epsilon must be >= 0");
  for (std::size_t i = 0; i < m; ++i) {
    if (coverage_[i].size() != num_instances_)
      throw DegenerateProblemError("coverage set has the wrong size");
    if (lengths_[i] < 0 || errors_[i] < 0)
      throw DomainError("lengths and errors must be >= 0");
  }
  conflict_.assign(m * m, 0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = i + 1; k < m; ++k) {
      if (rule_classes_[i] == rule_classes_[k]) continue;
      const auto q = static_cast<std::int32_t>(coverage_[i].intersection_count(coverage_[k]));
      conflict_[i * m + k] = q;
      conflict_[k * m + i] = q;
    }
}

void Problem::attach_rules(std::vector<Rule> rules) {
  if (rules.size() != num_rules()) throw DegenerateProblemError("rule count mismatch");
  rules_ = std::move(rules);
}

ConstraintSystem Problem::constraints() const {
  ConstraintSystem cs;
  cs.lengths.assign(lengths_.begin(), lengths_.end());
  cs.errors.assign(errors_.begin(), errors_.end());
  cs.complexity_budget = budgets_.complexity;
  cs.error_budget = budgets_.errors;
  return cs;
}

Problem Problem::with_budgets(Budgets budgets) const {
  if (budgets.complexity < 0 || budgets.errors < 0) throw DomainError("budgets must be >= 0");
  Problem p = *this;
  p.budgets_ = budgets;
  return p;
}

Problem Problem::with_epsilon(double epsilon) const {
  if (epsilon < 0) throw DomainError("epsilon must be >= 0");
  Problem p = *this;
  p.epsilon_ = epsilon;
  return p;
}

Problem build_problem(const std::vector<Rule>& rules, const Dataset& data,
                      double epsilon, Budgets budgets) {
  if (rules.empty()) throw DegenerateProblemError("empty rule pool");
  std::vector<Bitset> cov;
  std::vector<int> classes, lengths, errors;
  for (const auto& r : rules) {
    auto s = rule_stats(r, data);
    cov.push_back(std::move(s.covered));
    classes.push_back(r.predicted_class);
    lengths.push_back(s.length);
    errors.push_back(s.ic);
  }
  Problem p(std::move(cov), std::move(classes), std::move(lengths), std::move(errors),
            data.num_instances(), budgets, epsilon);
  p.attach_rules(rules);
  return p;
}

Evaluation fitness(const Problem& p, std::span<const std::size_t> selected) {
  Evaluation ev;
  Bitset covered(p.num_instances());
  for (std::size_t a = 0; a < selected.size(); ++a) {
    const auto i = selected[a];
    covered |= p.coverage(i);
    ev.complexity += p.length(i);
    ev.errors += p.errors(i);
    for (std::size_t b = a + 1; b < selected.size(); ++b)
      ev.conflicts += 2 * static_cast<std::int64_t>(p.conflict(i, selected[b]));
  }
  ev.covered = static_cast<int>(covered.count());
  ev.fitness = combine_fitness(ev.covered, ev.conflicts, p.epsilon());
  ev.conflict_penalty = 0.5 * p.epsilon() * static_cast<double>(ev.conflicts);
  ev.coverage_score = ev.fitness / static_cast<double>(p.num_instances());
  return ev;
}

Evaluation fitness(const Problem& p, const Chromosome& r) {
  if (r.size() != p.num_rules()) throw DomainError("chromosome length mismatch");
  const auto sel = r.selected();
  return fitness(p, sel);
}

bool feasible(const Problem& p, const Chromosome& r) {
  long l = 0, e = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!r[i]) continue;
    l += p.length(i);
    e += p.errors(i);
  }
  return l <= p.budgets().complexity && e <= p.budgets().errors;
}

Optimum brute_force_optimum(const Problem& p) {
  const std::size_t m = p.num_rules();
  if (m > kBruteForceLimit)
    throw EnumerationLimitError("brute force refused for M = " + std::to_string(m));
  Optimum best{Chromosome(m), fitness(p, Chromosome(m))};
  std::vector<std::size_t> sel;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
    sel.clear();
    long l = 0, e = 0;
    for (std::size_t i = 0; i < m; ++i)
      if (mask >> i & 1) {
        sel.push_back(i);
        l += p.length(i);
        e += p.errors(i);
      }
    if (l > p.budgets().complexity || e > p.budgets().errors) continue;
    auto ev = fitness(p, sel);
    bool take = ev.fitness > best.evaluation.fitness;
    if (!take && ev.fitness == best.evaluation.fitness) {
      Chromosome c(m);
      for (auto i : sel) c.set(i, true);
      // Bit strings compare with r_1 first; a 1 in front is lexicographically larger.
      take = ev.complexity < best.evaluation.complexity ||
             (ev.complexity == best.evaluation.complexity && c < best.chromosome);
    }
    if (take) {
      Chromosome c(m);
      for (auto i : sel) c.set(i, true);
      best = {std::move(c), ev};
    }
  }
  return best;
}

nlohmann::json rule_to_json(const Rule& r) {
  nlohmann::json conds = nlohmann::json::array();
  for (const auto& c : r.conditions)
    conds.push_back({{"feature", c.feature},
                     {"op", c.op == Op::le ? "<=" : ">"},
                     {"threshold", c.threshold}});
  return {{"conditions", conds}, {"class", r.predicted_class}};
}

Rule rule_from_json(const nlohmann::json& j) {
  Rule r;
  r.predicted_class = j.at("class").get<int>();
  for (const auto& c : j.at("conditions")) {
    const auto op = c.at("op").get<std::string>();
    if (op != "<=" && op != ">") throw ParseError("bad op '" + op + "'", 0);
    r.conditions.push_back({c.at("feature").get<int>(), op == "<=" ? Op::le : Op::gt,
                            c.at("threshold").get<double>()});
  }
  return r;
}

nlohmann::json problem_to_json(const Problem& p) {
  nlohmann::json rules = nlohmann::json::array();
  for (const auto& r : p.rules()) rules.push_back(rule_to_json(r));
  return {{"rules", rules},
          {"budgets", {{"complexity", p.budgets().complexity}, {"errors", p.budgets().errors}}},
          {"epsilon", p.epsilon()}};
}

Problem problem_from_json(const nlohmann::json& j, const Dataset& data) {
  std::vector<Rule> rules;
  for (const auto& r : j.at("rules")) rules.push_back(rule_from_json(r));
  Budgets b{j.at("budgets").at("complexity").get<int>(), j.at("budgets").at("errors").get<int>()};
  return build_problem(rules, data, j.at("epsilon").get<double>(), b);
}

}  // namespace rulex
