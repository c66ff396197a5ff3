#include "rulex/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "rulex/errors.hpp"

namespace rulex {

namespace {

std::string trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_line(std::string_view line, char delim) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delim) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

bool blank(std::string_view line) {
  return line.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  double v = 0;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  return v;
}

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

std::size_t RawTable::target_index() const {
  auto it = std::find(columns.begin(), columns.end(), target);
  if (it == columns.end())
    throw SchemaError("target column '" + target + "' not found");
  return static_cast<std::size_t>(it - columns.begin());
}

RawTable parse_csv(const std::string& text, const std::string& target,
                   const CsvOptions& options) {
  RawTable table;
  table.target = target;
  std::istringstream in(text);
  std::string line;
  bool header_pending = options.has_header;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    auto fields = split_line(line, options.delimiter);
    if (header_pending) {
      table.columns = std::move(fields);
      header_pending = false;
      continue;
    }
    if (table.columns.empty()) {
      for (std::size_t k = 0; k < fields.size(); ++k)
        table.columns.push_back(std::to_string(k));
    }
    if (fields.size() != table.columns.size()) {
      const auto row = table.cells.size();
      throw ParseError("row " + std::to_string(row) + " (line " +
                           std::to_string(line_no) + ") has " +
                           std::to_string(fields.size()) + " fields, expected " +
                           std::to_string(table.columns.size()),
                       row);
    }
    table.cells.push_back(std::move(fields));
  }
  if (table.columns.empty()) throw SchemaError("empty input");
  table.target_index();
  return table;
}

RawTable load_csv(const std::filesystem::path& path, const std::string& target,
                  const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), target, options);
}

MissingPolicy parse_missing_policy(const std::string& name) {
  if (name == "drop_rows" || name == "drop") return MissingPolicy::drop_rows;
  if (name == "impute_mode_mean" || name == "impute")
    return MissingPolicy::impute_mode_mean;
  if (name == "category_as_is" || name == "category")
    return MissingPolicy::category_as_is;
  throw Error("unknown missing-value policy '" + name + "'");
}

std::string to_string(MissingPolicy policy) {
  switch (policy) {
    case MissingPolicy::drop_rows: return "drop_rows";
    case MissingPolicy::impute_mode_mean: return "impute_mode_mean";
    case MissingPolicy::category_as_is: return "category_as_is";
  }
  return "?";
}

bool is_missing(const std::string& cell) noexcept {
  return cell.empty() || cell == "?";
}

std::vector<std::string> EncodingMap::decode(std::span<const double> row) const {
  std::vector<std::string> out;
  out.reserve(columns.size());
  for (const auto& col : columns) {
    if (col.kind == ColumnEncoding::Kind::numeric) {
      out.push_back(shortest(row[col.columns.front()]));
      continue;
    }
    std::string value;
    for (std::size_t c = 0; c < col.columns.size(); ++c)
      if (row[col.columns[c]] == 1.0) value = col.categories[c];
    out.push_back(value);
  }
  return out;
}

Dataset::Dataset(std::vector<double> features, std::size_t num_features,
                 std::vector<std::string> feature_names, std::vector<int> labels,
                 std::vector<std::string> class_names)
    : features_(std::move(features)),
      num_features_(num_features),
      feature_names_(std::move(feature_names)),
      labels_(std::move(labels)),
      class_names_(std::move(class_names)) {
  if (num_features_ == 0 || labels_.empty())
    throw DegenerateDataError("dataset needs at least one row and one feature");
  if (features_.size() != labels_.size() * num_features_ ||
      feature_names_.size() != num_features_)
    throw SchemaError("dataset shape mismatch");
  if (class_names_.size() < 2)
    throw DegenerateDataError("dataset needs at least two classes");
  for (int y : labels_)
    if (y < 0 || static_cast<std::size_t>(y) >= class_names_.size())
      throw SchemaError("label out of range");
}

std::vector<int> Dataset::class_counts() const {
  std::vector<int> counts(num_classes(), 0);
  for (int y : labels_) ++counts[static_cast<std::size_t>(y)];
  return counts;
}

PreparedData prepare(const RawTable& raw, MissingPolicy policy) {
  const std::size_t target = raw.target_index();
  const bool literal_missing = policy == MissingPolicy::category_as_is;

  std::vector<std::vector<std::string>> rows;
  rows.reserve(raw.cells.size());
  for (const auto& r : raw.cells) {
    if (r.size() != raw.columns.size())
      throw ParseError("ragged row", rows.size());
    if (is_missing(r[target])) continue;
    if (policy == MissingPolicy::drop_rows &&
        std::any_of(r.begin(), r.end(), [](const auto& c) { return is_missing(c); }))
      continue;
    rows.push_back(r);
    if (literal_missing)
      for (auto& c : rows.back())
        if (c.empty()) c = "?";
  }

  std::set<std::string> class_set;
  for (const auto& r : rows) class_set.insert(r[target]);
  if (class_set.size() < 2)
    throw DegenerateDataError("fewer than 2 classes remain after missing-value handling");
  std::vector<std::string> class_names(class_set.begin(), class_set.end());
  std::map<std::string, int> class_index;
  for (std::size_t c = 0; c < class_names.size(); ++c)
    class_index[class_names[c]] = static_cast<int>(c);

  EncodingMap encoding;
  std::vector<std::string> feature_names;
  std::vector<std::vector<double>> columns;  // produced columns

  for (std::size_t k = 0; k < raw.columns.size(); ++k) {
    if (k == target) continue;
    ColumnEncoding enc;
    enc.name = raw.columns[k];

    bool numeric = true;
    double sum = 0;
    std::size_t present = 0;
    std::map<std::string, std::size_t> freq;
    for (const auto& r : rows) {
      const auto& cell = r[k];
      if (!literal_missing && is_missing(cell)) continue;
      ++freq[cell];
      ++present;
      if (auto v = parse_number(cell)) {
        sum += *v;
      } else {
        numeric = false;
      }
    }

    if (numeric) {
      const double mean = present > 0 ? sum / static_cast<double>(present) : 0.0;
      std::vector<double> col;
      col.reserve(rows.size());
      for (const auto& r : rows) {
        const auto& cell = r[k];
        col.push_back(is_missing(cell) ? mean : *parse_number(cell));
      }
      enc.kind = ColumnEncoding::Kind::numeric;
      enc.columns.push_back(columns.size());
      feature_names.push_back(enc.name);
      columns.push_back(std::move(col));
    } else {
      // Mode with lexicographic tie-break (std::map iterates in order).
      std::string mode;
      std::size_t best = 0;
      for (const auto& [value, n] : freq)
        if (n > best) {
          best = n;
          mode = value;
        }
      enc.kind = ColumnEncoding::Kind::one_hot;
      for (const auto& [value, n] : freq) enc.categories.push_back(value);
      for (const auto& cat : enc.categories) {
        enc.columns.push_back(columns.size());
        feature_names.push_back(enc.name + "_" + cat);
        std::vector<double> col;
        col.reserve(rows.size());
        for (const auto& r : rows) {
          const auto& cell = r[k];
          const auto& value = (!literal_missing && is_missing(cell)) ? mode : cell;
          col.push_back(value == cat ? 1.0 : 0.0);
        }
        columns.push_back(std::move(col));
      }
    }
    encoding.columns.push_back(std::move(enc));
  }

  if (columns.empty()) throw DegenerateDataError("no feature columns");
  const std::size_t d = columns.size();
  std::vector<double> features(rows.size() * d);
  for (std::size_t j = 0; j < rows.size(); ++j)
    for (std::size_t k = 0; k < d; ++k) features[j * d + k] = columns[k][j];
  std::vector<int> labels;
  labels.reserve(rows.size());
  for (const auto& r : rows) labels.push_back(class_index.at(r[target]));

  return {Dataset(std::move(features), d, std::move(feature_names),
                  std::move(labels), std::move(class_names)),
          std::move(encoding)};
}

}  // namespace rulex
