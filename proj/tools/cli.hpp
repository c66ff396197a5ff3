#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rulex/baselines.hpp"
#include "rulex/dataset.hpp"
#include "rulex/problem.hpp"
#include "rulex/qga.hpp"
#include "rulex/rules.hpp"

namespace rulex::cli {

enum class Algorithm { qga, rf_hc, irfre, irfre_rfhc, forexpp };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

struct RunConfig {
  std::filesystem::path data_path;
  std::string target;  // empty: last column
  bool has_header = true;
  char delimiter = ',';
  MissingPolicy missing = MissingPolicy::category_as_is;
  int depth_cap = 3;
  std::optional<int> complexity_budget;
  std::optional<int> error_budget;
  std::optional<double> error_fraction;
  std::optional<double> epsilon;  // default 1/N
  std::vector<Algorithm> algorithms{Algorithm::qga};
  int repeats = 1;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";
  bool timing = true;
  int jobs = 1;
  int rf_hc_trials = 30;
  QgaConfig qga;
  IrfreConfig irfre;
};

struct RunRecord {
  std::uint64_t seed = 0;
  Chromosome chromosome;
  Evaluation evaluation;
  double seconds = 0.0;
  std::vector<GenerationTrace> trace;  // QGA only
  std::string stop_reason;             // QGA only
};

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation
};

struct RunReport {
  Algorithm algorithm = Algorithm::qga;
  std::vector<RunRecord> runs;
  Summary complexity, errors, coverage, seconds;
  std::size_t best_run = 0;  // highest coverage score, earliest on ties
  std::vector<std::string> best_rules;
};

// Loaded dataset, rule pool and Problem shared by every algorithm and repeat.
struct Workspace {
  std::string dataset_name;
  Dataset data;
  RulePool pool;
  Problem problem;
  std::pair<int, int> best_tree{0, 0};  // (c*, e*)
};

Workspace prepare_workspace(const RunConfig& config);

// (c*, e*) of the tree with minimum simplified-rule complexity, fewer
// training errors on ties.
std::pair<int, int> cmd_budget_from_best_tree(const Dataset& data, int max_depth_cap,
                                              std::uint64_t seed = 0);

RunRecord run_once(const Workspace& ws, const RunConfig& config, Algorithm algorithm,
                   std::uint64_t seed);
RunReport run_repeats(const Workspace& ws, const RunConfig& config, Algorithm algorithm);
Summary summarize(const std::vector<double>& values);

nlohmann::json report_to_json(const RunReport& report, const Workspace& ws,
                              const RunConfig& config);
std::string render_explanation(const Workspace& ws, const Chromosome& r);

// Re-parses an explanation and checks that its evaluation reproduces
// `expected` (complexity, errors, covered, conflicts).
bool explanation_matches(const std::string& text, const Workspace& ws,
                         const Evaluation& expected);

// Writes <out>/<dataset>/<algorithm>/{report.json, explanation.txt, trace.csv}.
void write_artifacts(const RunReport& report, const Workspace& ws, const RunConfig& config);

RunReport cmd_explain(const RunConfig& config);
std::vector<RunReport> cmd_compare(const RunConfig& config);
std::string compare_table(const std::vector<RunReport>& reports, const Workspace& ws);
std::string cmd_rules(const RunConfig& config);

std::string format_mean_std(const Summary& s, int decimals);

int main(int argc, char** argv);

}  // namespace rulex::cli
