#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace rulex {

// Delimiter-separated table as read from disk, before any encoding.
struct RawTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> cells;  // rows x columns
  std::string target;

  std::size_t num_rows() const noexcept { return cells.size(); }
  std::size_t target_index() const;
};

struct CsvOptions {
  bool has_header = true;
  char delimiter = ',';
};

// Reads a delimiter-separated file. Without a header, columns are named by
// their 0-based position ("0", "1", ...). Blank lines are skipped; double
// quoted fields may contain the delimiter.
RawTable load_csv(const std::filesystem::path& path, const std::string& target,
                  const CsvOptions& options = {});
RawTable parse_csv(const std::string& text, const std::string& target,
                   const CsvOptions& options = {});

enum class MissingPolicy {
  drop_rows,         // discard any row with a missing cell
  impute_mode_mean,  // mean for numeric columns, mode for categorical
  category_as_is,    // keep "?" as its own category (UCI style)
};

MissingPolicy parse_missing_policy(const std::string& name);
std::string to_string(MissingPolicy policy);

// Empty cells and "?" are missing markers.
bool is_missing(const std::string& cell) noexcept;

struct ColumnEncoding {
  enum class Kind { numeric, one_hot };

  std::string name;
  Kind kind = Kind::numeric;
  std::vector<std::string> categories;  // one_hot only, sorted
  std::vector<std::size_t> columns;     // produced feature indices
};

struct EncodingMap {
  std::vector<ColumnEncoding> columns;  // original feature columns, in order

  // Reconstructs the original cell values of one encoded row. Numeric values
  // are printed in shortest round-trip form.
  std::vector<std::string> decode(std::span<const double> row) const;
};

class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<double> features, std::size_t num_features,
          std::vector<std::string> feature_names, std::vector<int> labels,
          std::vector<std::string> class_names);

  std::size_t num_instances() const noexcept { return labels_.size(); }
  std::size_t num_features() const noexcept { return num_features_; }
  std::size_t num_classes() const noexcept { return class_names_.size(); }

  std::span<const double> row(std::size_t j) const noexcept {
    return {features_.data() + j * num_features_, num_features_};
  }
  double value(std::size_t j, std::size_t k) const noexcept {
    return features_[j * num_features_ + k];
  }
  int label(std::size_t j) const noexcept { return labels_[j]; }

  const std::vector<double>& features() const noexcept { return features_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  const std::vector<std::string>& feature_names() const noexcept {
    return feature_names_;
  }
  const std::vector<std::string>& class_names() const noexcept {
    return class_names_;
  }

  // Per-class instance counts.
  std::vector<int> class_counts() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<double> features_;  // row-major N x d
  std::size_t num_features_ = 0;
  std::vector<std::string> feature_names_;
  std::vector<int> labels_;
  std::vector<std::string> class_names_;
};

struct PreparedData {
  Dataset data;
  EncodingMap encoding;
};

// Encodes a raw table into a purely numeric dataset. A column is categorical
// iff one of its (non-missing, unless category_as_is) cells does not parse as
// a number; categorical columns are one-hot encoded as "<column>_<category>".
// Class labels are numbered in lexicographic order of their names. Rows with
// a missing target are always dropped.
PreparedData prepare(const RawTable& raw, MissingPolicy policy);

}  // namespace rulex
