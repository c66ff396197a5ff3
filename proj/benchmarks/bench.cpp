#include <benchmark/benchmark.h>

#include <map>
#include <string>

#include "rulex/cart.hpp"
#include "rulex/dataset.hpp"
#include "rulex/problem.hpp"
#include "rulex/qga.hpp"
#include "rulex/qubo.hpp"
#include "rulex/rules.hpp"

using namespace rulex;

namespace {

const Dataset& dataset(const std::string& name, const std::string& target) {
  static std::map<std::string, Dataset> cache;
  auto it = cache.find(name);
  if (it == cache.end()) {
    auto raw = load_csv(std::string(RULEX_DATA_DIR) + "/" + name + ".csv", target);
    it = cache.emplace(name, prepare(raw, MissingPolicy::category_as_is).data).first;
  }
  return it->second;
}

const Problem& wine_problem() {
  static const Problem p = [] {
    const auto& data = dataset("wine", "class");
    const auto pool = generate_rule_pool(data, 5, 0);
    return build_problem(pool.rules, data, 1.0 / static_cast<double>(data.num_instances()),
                         Budgets{8, 9});
  }();
  return p;
}

void BM_Fitness(benchmark::State& state) {
  const auto& p = wine_problem();
  Rng rng(1);
  Chromosome r(p.num_rules());
  for (std::size_t i = 0; i < p.num_rules(); ++i) r.set(i, uniform01(rng) < 0.03);
  for (auto _ : state) benchmark::DoNotOptimize(fitness(p, r));
}
BENCHMARK(BM_Fitness);

void BM_SuperMutation(benchmark::State& state) {
  const auto& p = wine_problem();
  Rng rng(2);
  const auto moves = approximate_kernel(p.constraints(), KernelConfig{}, rng);
  const Chromosome empty(p.num_rules());
  for (auto _ : state) benchmark::DoNotOptimize(super_mutation(p, empty, moves));
}
BENCHMARK(BM_SuperMutation)->Unit(benchmark::kMillisecond);

void BM_QuboGa(benchmark::State& state) {
  const auto& p = wine_problem();
  auto cs = p.constraints();
  const auto n = static_cast<std::size_t>(state.range(0));
  cs.lengths.resize(n);
  cs.errors.resize(n);
  const auto q = equality_qubo_factored(cs, {4, 4});
  Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(qubo_ga(q, QuboGaConfig{}, rng));
}
BENCHMARK(BM_QuboGa)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_TreeSweep(benchmark::State& state) {
  const auto& data = dataset("iris", "class");
  for (auto _ : state) benchmark::DoNotOptimize(sweep(data, 3, 0));
}
BENCHMARK(BM_TreeSweep)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
