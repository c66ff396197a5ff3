#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "rulex/baselines.hpp"
#include "rulex/cart.hpp"
#include "rulex/errors.hpp"

namespace rulex::cli {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::qga: return "qga";
    case Algorithm::rf_hc: return "rf_hc";
    case Algorithm::irfre: return "irfre";
    case Algorithm::irfre_rfhc: return "irfre_rfhc";
    case Algorithm::forexpp: return "forexpp";
  }
  return "qga";
}

Algorithm parse_algorithm(const std::string& name) {
  for (auto a : {Algorithm::qga, Algorithm::rf_hc, Algorithm::irfre, Algorithm::irfre_rfhc,
                 Algorithm::forexpp})
    if (name == to_string(a)) return a;
  throw DomainError("unknown algorithm: " + name);
}

namespace {

std::string last_column(const std::filesystem::path& path, char delimiter) {
  std::ifstream in(path);
  std::string line;
  if (!in || !std::getline(in, line)) throw SchemaError("cannot read " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto pos = line.rfind(delimiter);
  std::string name = pos == std::string::npos ? line : line.substr(pos + 1);
  if (name.size() >= 2 && name.front() == '"' && name.back() == '"')
    name = name.substr(1, name.size() - 2);
  return name;
}

int tree_errors(const DecisionTree& tree) {
  int errors = 0;
  for (const auto& node : tree.nodes)
    if (node.is_leaf())
      errors += std::accumulate(node.counts.begin(), node.counts.end(), 0) -
                node.counts[static_cast<std::size_t>(node.majority)];
  return errors;
}

double round_to(double v, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(v * scale) / scale;
}

}  // namespace

std::pair<int, int> cmd_budget_from_best_tree(const Dataset& data, int max_depth_cap,
                                              std::uint64_t seed) {
  std::pair<int, int> best{-1, -1};
  for (const auto& tree : sweep(data, max_depth_cap, seed)) {
    int complexity = 0;
    for (const auto& r : extract_rules(tree)) {
      try {
        complexity += simplify(r).length();
      } catch (const VacuousRuleError&) {
      }
    }
    const std::pair<int, int> cand{complexity, tree_errors(tree)};
    if (best.first < 0 || cand < best) best = cand;
  }
  return best;
}

Workspace prepare_workspace(const RunConfig& config) {
  CsvOptions csv{config.has_header, config.delimiter};
  std::string target = config.target;
  if (target.empty()) {
    if (!config.has_header) throw SchemaError("--target is required without a header row");
    target = last_column(config.data_path, config.delimiter);
  }
  auto prepared = prepare(load_csv(config.data_path, target, csv), config.missing);
  Dataset data = std::move(prepared.data);
  RulePool pool = generate_rule_pool(data, config.depth_cap, config.seed);
  const auto best_tree = cmd_budget_from_best_tree(data, config.depth_cap, config.seed);

  Budgets budgets{std::max(best_tree.first - 1, 0), best_tree.second};
  if (config.complexity_budget) budgets.complexity = *config.complexity_budget;
  if (config.error_fraction)
    budgets.errors = error_budget_from_fraction(*config.error_fraction, data.num_instances());
  if (config.error_budget) budgets.errors = *config.error_budget;
  if (budgets.complexity < 0 || budgets.errors < 0) throw DomainError("budgets must be >= 0");
  const double eps =
      config.epsilon ? *config.epsilon : 1.0 / static_cast<double>(data.num_instances());

  Problem problem = build_problem(pool.rules, data, eps, budgets);
  return Workspace{config.data_path.stem().string(), std::move(data), std::move(pool),
                   std::move(problem), best_tree};
}

RunRecord run_once(const Workspace& ws, const RunConfig& config, Algorithm algorithm,
                   std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  const Problem& p = ws.problem;
  RunRecord rec;
  rec.seed = seed;
  switch (algorithm) {
    case Algorithm::qga: {
      QgaConfig qc = config.qga;
      qc.seed = seed;
      qc.rf_hc_trials = config.rf_hc_trials;
      auto sol = qga_run(p, qc);
      rec.chromosome = std::move(sol.chromosome);
      rec.trace = std::move(sol.trace);
      rec.stop_reason = to_string(sol.stop_reason);
      break;
    }
    case Algorithm::rf_hc: {
      Rng rng(seed);
      rec.chromosome = rf_hc(p, RfHcConfig{config.rf_hc_trials}, rng).best;
      break;
    }
    case Algorithm::irfre: {
      Rng rng(seed);
      rec.chromosome = irfre(p, config.irfre, rng).best;
      break;
    }
    case Algorithm::irfre_rfhc: {
      Rng hc_rng(seed);
      auto hc = rf_hc(p, RfHcConfig{config.rf_hc_trials}, hc_rng);
      Rng rng(derive_seed(seed, 7));
      rec.chromosome = irfre(p, config.irfre, rng, hc.trial_solutions).best;
      break;
    }
    case Algorithm::forexpp: {
      Chromosome c(p.num_rules());
      for (auto i : forexpp(p.rules(), ws.data)) c.set(i, true);
      rec.chromosome = std::move(c);
      break;
    }
  }
  rec.evaluation = fitness(p, rec.chromosome);
  if (algorithm != Algorithm::forexpp && !feasible(p, rec.chromosome))
    throw InvariantViolation(to_string(algorithm) + " returned an infeasible selection");
  rec.seconds = config.timing
                    ? std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                          .count()
                    : 0.0;
  return rec;
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

RunReport run_repeats(const Workspace& ws, const RunConfig& config, Algorithm algorithm) {
  if (config.repeats < 1) throw DomainError("repeats must be >= 1");
  RunReport report;
  report.algorithm = algorithm;
  const auto n = static_cast<std::size_t>(config.repeats);
  report.runs.resize(n);

  const auto jobs = static_cast<std::size_t>(std::clamp(config.jobs, 1, config.repeats));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i)
      report.runs[i] = run_once(ws, config, algorithm, config.seed + i);
  } else {
    std::size_t next = 0;
    std::mutex mu;
    std::exception_ptr failure;
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < jobs; ++w)
      workers.emplace_back([&] {
        for (;;) {
          std::size_t i;
          {
            std::lock_guard lock(mu);
            if (next >= n || failure) return;
            i = next++;
          }
          try {
            auto rec = run_once(ws, config, algorithm, config.seed + i);
            report.runs[i] = std::move(rec);
          } catch (...) {
            std::lock_guard lock(mu);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    for (auto& t : workers) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<double> complexity, errors, coverage, seconds;
  for (const auto& r : report.runs) {
    complexity.push_back(r.evaluation.complexity);
    errors.push_back(r.evaluation.errors);
    coverage.push_back(r.evaluation.coverage_score);
    seconds.push_back(r.seconds);
  }
  report.complexity = summarize(complexity);
  report.errors = summarize(errors);
  report.coverage = summarize(coverage);
  report.seconds = summarize(seconds);
  for (std::size_t i = 1; i < n; ++i)
    if (coverage[i] > coverage[report.best_run]) report.best_run = i;
  for (auto i : report.runs[report.best_run].chromosome.selected())
    report.best_rules.push_back(render(ws.problem.rules()[i], ws.data));
  return report;
}

std::string render_explanation(const Workspace& ws, const Chromosome& r) {
  std::string out;
  for (auto i : r.selected()) out += render(ws.problem.rules()[i], ws.data) + "\n";
  return out;
}

bool explanation_matches(const std::string& text, const Workspace& ws,
                         const Evaluation& expected) {
  std::vector<Rule> rules;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty())
      rules.push_back(parse_rule(line, ws.data.feature_names(), ws.data.class_names()));
  if (rules.empty())
    return expected.complexity == 0 && expected.errors == 0 && expected.covered == 0 &&
           expected.conflicts == 0;

  std::vector<Bitset> cov;
  std::vector<int> classes, lengths, errors;
  for (const auto& r : rules) {
    auto st = rule_stats(r, ws.data);
    cov.push_back(st.covered);
    classes.push_back(r.predicted_class);
    lengths.push_back(st.length);
    errors.push_back(st.ic);
  }
  Problem reparsed(std::move(cov), std::move(classes), std::move(lengths), std::move(errors),
                   ws.data.num_instances(), ws.problem.budgets(), ws.problem.epsilon());
  Chromosome all(std::vector<std::uint8_t>(rules.size(), 1));
  const auto ev = fitness(reparsed, all);
  return ev.complexity == expected.complexity && ev.errors == expected.errors &&
         ev.covered == expected.covered && ev.conflicts == expected.conflicts;
}

nlohmann::json report_to_json(const RunReport& report, const Workspace& ws,
                              const RunConfig& config) {
  using nlohmann::json;
  const auto& b = ws.problem.budgets();
  json cfg = {
      {"dataset", ws.dataset_name},
      {"target", config.target},
      {"algorithm", to_string(report.algorithm)},
      {"missing", to_string(config.missing)},
      {"depth_cap", config.depth_cap},
      {"complexity_budget", b.complexity},
      {"error_budget", b.errors},
      {"epsilon", ws.problem.epsilon()},
      {"repeats", config.repeats},
      {"seed", config.seed},
      {"rule_pool_size", ws.problem.num_rules()},
      {"trees", ws.pool.tree_count},
      {"best_tree", {{"complexity", ws.best_tree.first}, {"errors", ws.best_tree.second}}},
  };
  if (report.algorithm == Algorithm::qga)
    cfg["qga"] = {{"generations", config.qga.generations},
                  {"max_population", config.qga.max_population},
                  {"crossover", to_string(config.qga.crossover)},
                  {"crossover_retries", config.qga.crossover_retries},
                  {"seed_rf_hc", config.qga.seed_rf_hc}};

  json runs = json::array();
  for (const auto& r : report.runs) {
    json run = {{"seed", r.seed},
                {"complexity", r.evaluation.complexity},
                {"errors", r.evaluation.errors},
                {"coverage_score", r.evaluation.coverage_score},
                {"fitness", r.evaluation.fitness},
                {"covered", r.evaluation.covered},
                {"conflicts", r.evaluation.conflicts},
                {"seconds", round_to(r.seconds, 1)},
                {"selection", r.chromosome.to_string()}};
    if (!r.stop_reason.empty()) {
      run["stop_reason"] = r.stop_reason;
      run["generations"] = r.trace.empty() ? 0 : r.trace.back().generation;
    }
    runs.push_back(std::move(run));
  }
  auto agg = [](const Summary& s) { return json{{"mean", s.mean}, {"std", s.std}}; };
  const auto& best = report.runs[report.best_run];
  return json{
      {"config", cfg},
      {"runs", runs},
      {"aggregate",
       {{"complexity", agg(report.complexity)},
        {"errors", agg(report.errors)},
        {"coverage_score", agg(report.coverage)},
        {"seconds", {{"mean", round_to(report.seconds.mean, 1)},
                     {"std", round_to(report.seconds.std, 1)}}}}},
      {"best_run",
       {{"index", report.best_run},
        {"seed", best.seed},
        {"coverage_score", best.evaluation.coverage_score},
        {"complexity", best.evaluation.complexity},
        {"errors", best.evaluation.errors}}},
      {"best_rules", report.best_rules},
  };
}

void write_artifacts(const RunReport& report, const Workspace& ws, const RunConfig& config) {
  const auto dir = config.out_dir / ws.dataset_name / to_string(report.algorithm);
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "report.json");
    out << report_to_json(report, ws, config).dump(2) << "\n";
  }
  const auto& best = report.runs[report.best_run];
  const auto text = render_explanation(ws, best.chromosome);
  {
    std::ofstream out(dir / "explanation.txt");
    out << text;
  }
  std::ifstream back(dir / "explanation.txt");
  std::stringstream buffer;
  buffer << back.rdbuf();
  if (!explanation_matches(buffer.str(), ws, best.evaluation))
    throw InvariantViolation("explanation.txt does not reproduce the reported evaluation");

  if (report.algorithm == Algorithm::qga) {
    std::ofstream out(dir / "trace.csv");
    out << "run,generation,min,mean,max,diversity\n";
    for (std::size_t i = 0; i < report.runs.size(); ++i) {
      const auto body = trace_to_csv(report.runs[i].trace);
      std::istringstream lines(body);
      std::string line;
      std::getline(lines, line);  // header
      while (std::getline(lines, line)) out << i << "," << line << "\n";
    }
  }
}

std::string format_mean_std(const Summary& s, int decimals) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.*f(±%.*f)", decimals, s.mean, decimals, s.std);
  return buf;
}

RunReport cmd_explain(const RunConfig& config) {
  const auto ws = prepare_workspace(config);
  auto report = run_repeats(ws, config, config.algorithms.front());
  write_artifacts(report, ws, config);
  return report;
}

std::string compare_table(const std::vector<RunReport>& reports, const Workspace& ws) {
  const auto& b = ws.problem.budgets();
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-12s %-18s %-18s %-14s %-16s %s\n", "Algorithm",
                "Complexity", "Errors", "Time (s)", "Coverage %", "Best %");
  out << buf;
  for (const auto& r : reports) {
    const auto cx = format_mean_std(r.complexity, 1) + " / " + std::to_string(b.complexity);
    const auto er = format_mean_std(r.errors, 1) + " / " + std::to_string(b.errors);
    Summary pct{100.0 * r.coverage.mean, 100.0 * r.coverage.std};
    std::snprintf(buf, sizeof buf, "%-12s %-18s %-18s %-14s %-16s %.1f\n",
                  to_string(r.algorithm).c_str(), cx.c_str(), er.c_str(),
                  format_mean_std(r.seconds, 1).c_str(), format_mean_std(pct, 1).c_str(),
                  100.0 * r.runs[r.best_run].evaluation.coverage_score);
    out << buf;
  }
  return out.str();
}

std::vector<RunReport> cmd_compare(const RunConfig& config) {
  if (config.algorithms.size() < 2) throw DomainError("compare needs at least two algorithms");
  const auto ws = prepare_workspace(config);
  std::vector<RunReport> reports;
  for (auto a : config.algorithms) {
    reports.push_back(run_repeats(ws, config, a));
    write_artifacts(reports.back(), ws, config);
  }
  const auto dir = config.out_dir / ws.dataset_name;
  std::ofstream(dir / "compare.txt") << compare_table(reports, ws);
  return reports;
}

std::string cmd_rules(const RunConfig& config) {
  const auto ws = prepare_workspace(config);
  std::ostringstream out;
  out << "# trees=" << ws.pool.tree_count << " extracted=" << ws.pool.extracted_count
      << " rules=" << ws.problem.num_rules() << "\n";
  for (std::size_t i = 0; i < ws.problem.num_rules(); ++i) {
    const int cov = static_cast<int>(ws.problem.coverage(i).count());
    out << i << "\tlen=" << ws.problem.length(i) << "\tcov=" << cov
        << "\terr=" << ws.problem.errors(i) << "\t" << render(ws.problem.rules()[i], ws.data)
        << "\n";
  }
  return out.str();
}

namespace {

void add_common(CLI::App& app, RunConfig& cfg, std::string& missing, std::string& crossover,
                std::vector<std::string>& algos, bool& no_timing, bool& no_header,
                bool multi_algo) {
  app.add_option("--data", cfg.data_path, "CSV dataset")->required()->check(CLI::ExistingFile);
  app.add_option("--target", cfg.target, "Target column (default: last column)");
  app.add_flag("--no-header", no_header, "The file has no header row");
  app.add_option("--delimiter", cfg.delimiter, "Field delimiter");
  app.add_option("--missing", missing, "drop_rows | impute_mode_mean | category_as_is");
  app.add_option("--depth-cap", cfg.depth_cap, "Maximum tree depth of the sweep")
      ->check(CLI::PositiveNumber);
  app.add_option("--bc", cfg.complexity_budget, "Complexity budget B_c");
  app.add_option("--be", cfg.error_budget, "Error budget B_e");
  app.add_option("--error-frac", cfg.error_fraction, "Error budget as a fraction of N");
  app.add_option("--epsilon", cfg.epsilon, "Conflict penalty (default 1/N)");
  app.add_option("--seed", cfg.seed, "Base seed; run i uses seed + i");
  app.add_option("--out", cfg.out_dir, "Output directory");
  app.add_option("--repeats", cfg.repeats, "Runs per algorithm")->check(CLI::PositiveNumber);
  app.add_option("--jobs", cfg.jobs, "Concurrent runs")->check(CLI::PositiveNumber);
  app.add_option("--crossover", crossover, "uniform | one_point | two_point");
  app.add_option("--generations", cfg.qga.generations, "QGA generations");
  app.add_option("--population", cfg.qga.max_population, "QGA population size");
  app.add_option("--retries", cfg.qga.crossover_retries, "QGA crossover retry cap");
  app.add_option("--rf-hc-trials", cfg.rf_hc_trials, "RF+HC trials");
  app.add_option("--irfre-generations", cfg.irfre.generations, "IRFRE generations");
  app.add_option("--irfre-population", cfg.irfre.max_population, "IRFRE population size");
  app.add_flag("--no-timing", no_timing, "Report zero run times (byte-stable output)");
  if (multi_algo)
    app.add_option("--algo", algos, "Algorithms to compare")->delimiter(',');
  else
    app.add_option("--algo", algos, "qga | rf_hc | irfre | irfre_rfhc | forexpp")
        ->expected(1);
}

// Expands `--config FILE` into command-line tokens placed right after the
// subcommand. Keys given on the command line are skipped, so flags win.
// Lines are key=value; blank lines, [sections] and #/; comments are ignored.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  auto it = std::find_if(args.begin(), args.end(), [](const std::string& a) {
    return a == "--config" || a.rfind("--config=", 0) == 0;
  });
  if (it == args.end()) return args;
  std::string path;
  if (*it == "--config") {
    if (it + 1 == args.end()) throw Error("--config needs a file name");
    path = *(it + 1);
    args.erase(it, it + 2);
  } else {
    path = it->substr(9);
    args.erase(it);
  }
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path);

  auto given = [&](const std::string& flag) {
    return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
  };
  std::vector<std::string> extra;
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#' || line[b] == ';' || line[b] == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("bad config line: " + line);
    auto trim = [](std::string v) {
      const auto f = v.find_first_not_of(" \t\r\"");
      if (f == std::string::npos) return std::string{};
      return v.substr(f, v.find_last_not_of(" \t\r\"") - f + 1);
    };
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto flag = "--" + key;
    if (given(flag) || value == "false") continue;
    extra.push_back(flag);
    if (value != "true") extra.push_back(value);
  }
  const auto at = args.size() > 1 ? args.begin() + 2 : args.end();
  args.insert(at, extra.begin(), extra.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rule-set explanations of tabular data under complexity and error budgets"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string missing = to_string(cfg.missing);
  std::string crossover = to_string(cfg.qga.crossover);
  std::vector<std::string> algos;
  bool no_timing = false, no_header = false, no_seeding = false;
  std::string config_file;  // consumed by expand_config, listed for --help

  auto* explain = app.add_subcommand("explain", "Select a rule set with one algorithm");
  auto* compare = app.add_subcommand("compare", "Run several algorithms on one rule pool");
  auto* budget = app.add_subcommand("budget", "Budgets suggested by the best swept tree");
  auto* rules = app.add_subcommand("rules", "Dump the generated rule pool");
  for (auto* sub : {explain, compare, budget, rules}) {
    sub->add_option("--config", config_file, "key=value configuration file; flags win");
    add_common(*sub, cfg, missing, crossover, algos, no_timing, no_header, sub == compare);
  }
  for (auto* sub : {explain, compare})
    sub->add_flag("--no-rf-hc-seeding", no_seeding, "Do not seed QGA with RF+HC results");

  std::vector<std::string> args;
  try {
    args = expand_config(std::vector<std::string>(argv, argv + argc));
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::vector<char*> cargs;
  for (auto& a : args) cargs.push_back(a.data());
  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    cfg.missing = parse_missing_policy(missing);
    cfg.qga.crossover = parse_crossover(crossover);
    cfg.timing = !no_timing;
    cfg.has_header = !no_header;
    cfg.qga.seed_rf_hc = !no_seeding;
    if (!algos.empty()) {
      cfg.algorithms.clear();
      for (const auto& a : algos) cfg.algorithms.push_back(parse_algorithm(a));
    } else if (compare->parsed()) {
      cfg.algorithms = {Algorithm::qga, Algorithm::rf_hc, Algorithm::irfre,
                        Algorithm::irfre_rfhc};
    }
    if (cfg.qga.max_population < 2 || cfg.qga.max_population % 2 != 0)
      throw DomainError("--population must be even and >= 2");

    if (explain->parsed()) {
      auto report = cmd_explain(cfg);
      const auto ws_dir = cfg.out_dir / cfg.data_path.stem() / to_string(report.algorithm);
      std::cout << to_string(report.algorithm) << ": coverage "
                << format_mean_std({100 * report.coverage.mean, 100 * report.coverage.std}, 1)
                << "%  complexity " << format_mean_std(report.complexity, 1) << "  errors "
                << format_mean_std(report.errors, 1) << "\n";
      for (const auto& r : report.best_rules) std::cout << r << "\n";
      std::cout << "artifacts: " << ws_dir.string() << "\n";
    } else if (compare->parsed()) {
      auto reports = cmd_compare(cfg);
      std::ifstream table(cfg.out_dir / cfg.data_path.stem() / "compare.txt");
      std::cout << table.rdbuf();
    } else if (budget->parsed()) {
      auto prepared = prepare(
          load_csv(cfg.data_path,
                   cfg.target.empty() ? last_column(cfg.data_path, cfg.delimiter) : cfg.target,
                   {cfg.has_header, cfg.delimiter}),
          cfg.missing);
      const auto [c, e] = cmd_budget_from_best_tree(prepared.data, cfg.depth_cap, cfg.seed);
      std::cout << "c* = " << c << "\ne* = " << e << "\nsuggested: --bc " << std::max(c - 1, 0)
                << " --be " << e << "\n";
    } else if (rules->parsed()) {
      std::cout << cmd_rules(cfg);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace rulex::cli
