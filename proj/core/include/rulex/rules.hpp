#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rulex/bitset.hpp"
#include "rulex/cart.hpp"
#include "rulex/dataset.hpp"

namespace rulex {

enum class Op : std::uint8_t { le, gt };  // "<=" inclusive, ">" strict

struct Condition {
  int feature = 0;
  Op op = Op::le;
  double threshold = 0.0;

  bool holds(double v) const noexcept { return op == Op::le ? v <= threshold : v > threshold; }

  friend bool operator==(const Condition&, const Condition&) = default;
  friend auto operator<=>(const Condition&, const Condition&) = default;
};

struct Rule {
  std::vector<Condition> conditions;
  int predicted_class = 0;

  int length() const noexcept { return static_cast<int>(conditions.size()); }

  friend bool operator==(const Rule&, const Rule&) = default;
};

struct RuleStats {
  int length = 0;
  Bitset covered;
  int cc = 0;  // covered and correctly classified
  int ic = 0;  // covered and misclassified

  int coverage() const noexcept { return cc + ic; }
};

// One rule per leaf, conditions in root-to-leaf order.
std::vector<Rule> extract_rules(const DecisionTree& tree);

// Merges conditions per feature: "<=" keeps the smallest threshold, ">" the
// largest. Output is sorted by feature, "<=" before ">". Throws
// VacuousRuleError if a feature's interval becomes empty.
Rule simplify(const Rule& rule);

bool covers(const Rule& rule, std::span<const double> x) noexcept;
Bitset coverage(const Rule& rule, const Dataset& data);
RuleStats rule_stats(const Rule& rule, const Dataset& data);

// Keeps the first rule of every class of identical or empirically equivalent
// rules (same covered set and same predicted class). Vacuous rules are
// dropped. Input order is preserved.
std::vector<Rule> dedup(const std::vector<Rule>& rules, const Dataset& data);

// Replaces every threshold by its value rounded to `decimals` places when no
// value of that feature in `data` separates the two, so covered sets are
// unchanged and the rendered rule reads back exactly.
Rule quantize_thresholds(const Rule& rule, const Dataset& data, int decimals = 3);

// "2.45", "0.032", "1125" (up to 3 decimals, trailing zeros trimmed).
std::string format_threshold(double t);

// IF <name> <= <t> AND ... THEN CLASS=<class>; "IF TRUE THEN CLASS=<c>" for
// the empty conjunction.
std::string render(const Rule& rule, const std::vector<std::string>& feature_names,
                   const std::vector<std::string>& class_names);
std::string render(const Rule& rule, const Dataset& data);

// Inverse of render(); throws ParseError on unknown names or bad syntax.
Rule parse_rule(const std::string& text, const std::vector<std::string>& feature_names,
                const std::vector<std::string>& class_names);

struct RulePool {
  std::vector<Rule> rules;
  std::size_t tree_count = 0;
  std::size_t extracted_count = 0;  // before simplification and deduplication
};

// sweep -> extract -> simplify -> quantize -> dedup.
RulePool generate_rule_pool(const Dataset& data, int max_depth_cap,
                            std::uint64_t base_seed = 0);

}  // namespace rulex
