#include "rulex/rules.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <charconv>

#include "rulex/errors.hpp"

namespace rulex {

std::vector<Rule> extract_rules(const DecisionTree& tree) {
  std::vector<Rule> out;
  std::vector<Condition> path;
  auto visit = [&](auto&& self, std::size_t i) -> void {
    const auto& n = tree.nodes[i];
    if (n.is_leaf()) {
      out.push_back({path, n.majority});
      return;
    }
    path.push_back({n.feature, Op::le, n.threshold});
    self(self, static_cast<std::size_t>(n.left));
    path.back().op = Op::gt;
    self(self, static_cast<std::size_t>(n.right));
    path.pop_back();
  };
  if (!tree.nodes.empty()) visit(visit, 0);
  return out;
}

Rule simplify(const Rule& rule) {
  std::map<int, double> upper, lower;  // "<=" and ">" bounds
  for (const auto& c : rule.conditions) {
    if (c.op == Op::le) {
      auto [it, fresh] = upper.try_emplace(c.feature, c.threshold);
      if (!fresh) it->second = std::min(it->second, c.threshold);
    } else {
      auto [it, fresh] = lower.try_emplace(c.feature, c.threshold);
      if (!fresh) it->second = std::max(it->second, c.threshold);
    }
  }
  std::set<int> features;
  for (const auto& [f, _] : upper) features.insert(f);
  for (const auto& [f, _] : lower) features.insert(f);

  Rule out;
  out.predicted_class = rule.predicted_class;
  for (int f : features) {
    const auto u = upper.find(f);
    const auto l = lower.find(f);
    if (u != upper.end() && l != lower.end() && u->second <= l->second)
      throw VacuousRuleError("empty interval on feature " + std::to_string(f));
    if (u != upper.end()) out.conditions.push_back({f, Op::le, u->second});
    if (l != lower.end()) out.conditions.push_back({f, Op::gt, l->second});
  }
  return out;
}

bool covers(const Rule& rule, std::span<const double> x) noexcept {
  for (const auto& c : rule.conditions)
    if (!c.holds(x[static_cast<std::size_t>(c.feature)])) return false;
  return true;
}

Bitset coverage(const Rule& rule, const Dataset& data) {
  Bitset out(data.num_instances());
  for (std::size_t j = 0; j < data.num_instances(); ++j)
    if (covers(rule, data.row(j))) out.set(j);
  return out;
}

RuleStats rule_stats(const Rule& rule, const Dataset& data) {
  RuleStats s;
  s.length = rule.length();
  s.covered = coverage(rule, data);
  for (auto j : s.covered.indices()) {
    if (data.label(j) == rule.predicted_class)
      ++s.cc;
    else
      ++s.ic;
  }
  return s;
}

std::vector<Rule> dedup(const std::vector<Rule>& rules, const Dataset& data) {
  std::vector<Rule> out;
  std::set<std::pair<std::vector<Condition>, int>> seen_rules;
  std::set<std::pair<Bitset, int>> seen_signatures;
  for (const auto& r : rules) {
    try {
      simplify(r);
    } catch (const VacuousRuleError&) {
      continue;
    }
    if (!seen_rules.emplace(r.conditions, r.predicted_class).second) continue;
    if (!seen_signatures.emplace(coverage(r, data), r.predicted_class).second) continue;
    out.push_back(r);
  }
  return out;
}

Rule quantize_thresholds(const Rule& rule, const Dataset& data, int decimals) {
  const double scale = std::pow(10.0, decimals);
  Rule out = rule;
  for (auto& c : out.conditions) {
    const double q = std::round(c.threshold * scale) / scale;
    if (q == c.threshold) continue;
    const double lo = std::min(q, c.threshold), hi = std::max(q, c.threshold);
    // v <= lo and v > hi evaluate identically under both thresholds.
    bool separates = false;
    for (std::size_t j = 0; j < data.num_instances() && !separates; ++j) {
      const double v = data.value(j, static_cast<std::size_t>(c.feature));
      separates = v > lo && v <= hi;
    }
    if (!separates) c.threshold = q;
  }
  return out;
}

std::string format_threshold(double t) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", t);
  std::string s(buf);
  if (auto dot = s.find('.'); dot != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

std::string render(const Rule& rule, const std::vector<std::string>& feature_names,
                   const std::vector<std::string>& class_names) {
  std::string out = "IF ";
  if (rule.conditions.empty()) out += "TRUE";
  for (std::size_t i = 0; i < rule.conditions.size(); ++i) {
    const auto& c = rule.conditions[i];
    if (i > 0) out += " AND ";
    out += feature_names.at(static_cast<std::size_t>(c.feature));
    out += c.op == Op::le ? " <= " : " > ";
    out += format_threshold(c.threshold);
  }
  out += " THEN CLASS=";
  out += class_names.at(static_cast<std::size_t>(rule.predicted_class));
  return out;
}

std::string render(const Rule& rule, const Dataset& data) {
  return render(rule, data.feature_names(), data.class_names());
}

namespace {

std::vector<std::string> split_on(const std::string& s, const std::string& sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + sep.size();
  }
}

double parse_double(const std::string& s, const std::string& line) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ParseError("bad threshold '" + s + "' in: " + line, 0);
  return v;
}

}  // namespace

Rule parse_rule(const std::string& text, const std::vector<std::string>& feature_names,
                const std::vector<std::string>& class_names) {
  std::string line = text;
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n' || line.back() == ' '))
    line.pop_back();
  const std::string then = " THEN CLASS=";
  auto then_pos = line.rfind(then);
  if (line.rfind("IF ", 0) != 0 || then_pos == std::string::npos)
    throw ParseError("not a rule: " + line, 0);

  Rule rule;
  const auto cls = line.substr(then_pos + then.size());
  auto cit = std::find(class_names.begin(), class_names.end(), cls);
  if (cit == class_names.end()) throw ParseError("unknown class '" + cls + "'", 0);
  rule.predicted_class = static_cast<int>(cit - class_names.begin());

  const auto body = line.substr(3, then_pos - 3);
  if (body == "TRUE") return rule;
  for (const auto& part : split_on(body, " AND ")) {
    Condition c;
    auto le = part.rfind(" <= ");
    auto gt = part.rfind(" > ");
    std::size_t pos, width;
    if (le != std::string::npos && (gt == std::string::npos || le > gt)) {
      c.op = Op::le;
      pos = le;
      width = 4;
    } else if (gt != std::string::npos) {
      c.op = Op::gt;
      pos = gt;
      width = 3;
    } else {
      throw ParseError("bad condition '" + part + "'", 0);
    }
    const auto name = part.substr(0, pos);
    auto fit = std::find(feature_names.begin(), feature_names.end(), name);
    if (fit == feature_names.end()) throw ParseError("unknown feature '" + name + "'", 0);
    c.feature = static_cast<int>(fit - feature_names.begin());
    c.threshold = parse_double(part.substr(pos + width), line);
    rule.conditions.push_back(c);
  }
  return rule;
}

RulePool generate_rule_pool(const Dataset& data, int max_depth_cap,
                            std::uint64_t base_seed) {
  RulePool pool;
  std::vector<Rule> candidates;
  const auto trees = sweep(data, max_depth_cap, base_seed);
  pool.tree_count = trees.size();
  for (const auto& tree : trees) {
    for (auto& r : extract_rules(tree)) {
      ++pool.extracted_count;
      try {
        candidates.push_back(quantize_thresholds(simplify(r), data));
      } catch (const VacuousRuleError&) {
      }
    }
  }
  pool.rules = dedup(candidates, data);
  return pool;
}

}  // namespace rulex
