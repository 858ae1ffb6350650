#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "examl/csv.hpp"
#include "examl/errors.hpp"
#include "examl/linalg.hpp"

namespace examl {

// ---------------------------------------------------------------------------
// One-hot encoding
// ---------------------------------------------------------------------------

inline std::vector<std::string> split_items(const std::string& cell, const std::string& separator) {
  if (separator.empty()) return {cell};
  std::vector<std::string> items;
  std::size_t start = 0;
  while (start <= cell.size()) {
    const std::size_t stop = cell.find(separator, start);
    std::string item = cell.substr(start, stop == std::string::npos ? std::string::npos : stop - start);
    if (!item.empty()) items.push_back(std::move(item));
    if (stop == std::string::npos) break;
    start = stop + separator.size();
  }
  return items;
}

/// Indicator encoding for one categorical column. Categories seen fewer than
/// min_frequency times are dropped; rows holding only dropped categories encode
/// as all zeros. Kept categories are ordered by first appearance.
/// With a separator, a cell holds a list of categories and encodes multi-hot.
class CategoryEncoder {
 public:
  CategoryEncoder() = default;
  CategoryEncoder(std::string name, std::vector<std::string> categories, std::string separator = {})
      : name_(std::move(name)), categories_(std::move(categories)), separator_(std::move(separator)) {
    reindex();
  }

  static CategoryEncoder fit(const std::vector<std::string>& values, std::size_t min_frequency,
                             std::string name = {}, std::string separator = {}) {
    if (min_frequency < 1) throw InvalidArgument("min_frequency must be >= 1");
    std::vector<std::string> order;
    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& cell : values)
      for (auto& item : split_items(cell, separator))
        if (counts[item]++ == 0) order.push_back(item);
    std::vector<std::string> kept;
    for (auto& c : order)
      if (counts[c] >= min_frequency) kept.push_back(c);
    return CategoryEncoder(std::move(name), std::move(kept), std::move(separator));
  }

  Matrix transform(const std::vector<std::string>& values) const {
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(categories_.size()));
    for (std::size_t r = 0; r < values.size(); ++r)
      for (const auto& item : split_items(values[r], separator_)) {
        auto it = index_.find(item);
        if (it != index_.end()) out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(it->second)) = 1.0;
      }
    return out;
  }

  const std::string& name() const { return name_; }
  const std::vector<std::string>& categories() const { return categories_; }
  const std::string& separator() const { return separator_; }

 private:
  void reindex() {
    index_.clear();
    for (std::size_t i = 0; i < categories_.size(); ++i) index_.emplace(categories_[i], i);
  }

  std::string name_;
  std::vector<std::string> categories_;
  std::string separator_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct OneHot {
  Matrix indicators;
  std::vector<std::string> categories;
};

inline OneHot one_hot_encode(const std::vector<std::string>& column, std::size_t min_frequency) {
  auto enc = CategoryEncoder::fit(column, min_frequency);
  return {enc.transform(column), enc.categories()};
}

/// Turns a RawTable into the numeric feature matrix: numeric columns first, in
/// table order, then each categorical column's indicator block.
class FeatureEncoder {
 public:
  FeatureEncoder() = default;
  FeatureEncoder(std::vector<std::string> numeric_names, std::vector<CategoryEncoder> categorical)
      : numeric_names_(std::move(numeric_names)), categorical_(std::move(categorical)) {}

  static FeatureEncoder fit(const RawTable& table) {
    std::vector<CategoryEncoder> encoders;
    for (const auto& col : table.categorical)
      encoders.push_back(CategoryEncoder::fit(col.values, col.min_frequency, col.name, col.separator));
    return FeatureEncoder(table.numeric_names, std::move(encoders));
  }

  Matrix transform(const RawTable& table) const {
    if (table.numeric_names != numeric_names_ || table.categorical.size() != categorical_.size())
      throw ShapeError("feature columns differ: expected " + describe_columns() + ", data provides " +
                       FeatureEncoder::fit(table).describe_columns());
    for (std::size_t k = 0; k < categorical_.size(); ++k)
      if (table.categorical[k].name != categorical_[k].name())
        throw ShapeError("feature columns differ: expected categorical column '" + categorical_[k].name() +
                         "', data provides '" + table.categorical[k].name + "'");
    Matrix X(static_cast<Eigen::Index>(table.rows()), static_cast<Eigen::Index>(width()));
    X.leftCols(table.numeric.cols()) = table.numeric;
    Eigen::Index col = table.numeric.cols();
    for (std::size_t k = 0; k < categorical_.size(); ++k) {
      Matrix block = categorical_[k].transform(table.categorical[k].values);
      X.middleCols(col, block.cols()) = block;
      col += block.cols();
    }
    return X;
  }

  std::size_t width() const {
    std::size_t w = numeric_names_.size();
    for (const auto& c : categorical_) w += c.categories().size();
    return w;
  }

  std::size_t source_columns() const { return numeric_names_.size() + categorical_.size(); }

  std::string describe_columns() const {
    return std::to_string(source_columns()) + " feature columns (" + std::to_string(numeric_names_.size()) +
           " numeric, " + std::to_string(categorical_.size()) + " categorical)";
  }

  const std::vector<std::string>& numeric_names() const { return numeric_names_; }
  const std::vector<CategoryEncoder>& categorical() const { return categorical_; }

 private:
  std::vector<std::string> numeric_names_;
  std::vector<CategoryEncoder> categorical_;
};

// ---------------------------------------------------------------------------
// Standardization
// ---------------------------------------------------------------------------

/// FNV-1a over shape and raw bytes. Identifies the exact matrix a statistic was fit on.
inline std::uint64_t fingerprint(const Matrix& X) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  const std::int64_t shape[2] = {X.rows(), X.cols()};
  feed(shape, sizeof shape);
  feed(X.data(), sizeof(double) * static_cast<std::size_t>(X.size()));
  return h;
}

inline constexpr double kStdFloor = 1e-12;

struct ScalerStats {
  Vector means;
  Vector stds;                   // population std, floored at kStdFloor
  std::uint64_t provenance = 0;  // fingerprint of the matrix the stats were fit on

  Eigen::Index features() const { return means.size(); }
};

inline ScalerStats standardize_fit(const Matrix& X) {
  if (X.rows() < 1) throw InvalidArgument("standardize_fit needs at least one row");
  ScalerStats s;
  s.means = X.colwise().mean().transpose();
  s.stds = ((X.rowwise() - s.means.transpose()).array().square().colwise().mean().sqrt()).transpose();
  s.stds = s.stds.cwiseMax(kStdFloor);
  s.provenance = fingerprint(X);
  return s;
}

inline Matrix standardize_apply(const Matrix& X, const ScalerStats& stats) {
  if (X.cols() != stats.features())
    throw ShapeError("scaler expects " + std::to_string(stats.features()) + " features, data has " +
                     std::to_string(X.cols()));
  return ((X.rowwise() - stats.means.transpose()).array().rowwise() / stats.stds.transpose().array()).matrix();
}

inline Matrix standardize_inverse(const Matrix& Z, const ScalerStats& stats) {
  if (Z.cols() != stats.features()) throw ShapeError("scaler feature count mismatch on inverse transform");
  return ((Z.array().rowwise() * stats.stds.transpose().array()).rowwise() + stats.means.transpose().array()).matrix();
}

// ---------------------------------------------------------------------------
// Targets
// ---------------------------------------------------------------------------

enum class TaskKind { classification, regression };

inline std::string_view to_string(TaskKind t) {
  return t == TaskKind::classification ? "classification" : "regression";
}

inline TaskKind parse_task(std::string_view s) {
  if (s == "classification") return TaskKind::classification;
  if (s == "regression") return TaskKind::regression;
  throw InvalidArgument("unknown task '" + std::string(s) + "'");
}

/// Ordered class list with one-hot {0, 1} encoding.
class LabelCodec {
 public:
  LabelCodec() = default;
  explicit LabelCodec(std::vector<std::string> classes) : classes_(std::move(classes)) {
    if (classes_.empty()) throw InvalidArgument("label codec needs at least one class");
    for (std::size_t i = 0; i < classes_.size(); ++i)
      if (!index_.emplace(classes_[i], i).second) throw InvalidArgument("duplicate class label '" + classes_[i] + "'");
  }

  /// Distinct labels, sorted numerically when every label parses as a number,
  /// lexicographically otherwise.
  static LabelCodec from_labels(const std::vector<std::string>& labels) {
    std::vector<std::string> distinct(labels.begin(), labels.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    const bool numeric = std::all_of(distinct.begin(), distinct.end(),
                                     [](const std::string& s) { return parse_number(s).has_value(); });
    if (numeric)
      std::stable_sort(distinct.begin(), distinct.end(),
                       [](const std::string& a, const std::string& b) { return *parse_number(a) < *parse_number(b); });
    return LabelCodec(std::move(distinct));
  }

  std::size_t size() const { return classes_.size(); }
  const std::vector<std::string>& classes() const { return classes_; }
  const std::string& decode(std::size_t index) const { return classes_.at(index); }

  std::size_t index_of(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw InvalidArgument("unknown class label '" + label + "'");
    return it->second;
  }

  bool contains(const std::string& label) const { return index_.count(label) > 0; }

  Matrix one_hot(const std::vector<std::string>& labels) const {
    Matrix Y = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), static_cast<Eigen::Index>(size()));
    for (std::size_t r = 0; r < labels.size(); ++r)
      Y(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(index_of(labels[r]))) = 1.0;
    return Y;
  }

 private:
  std::vector<std::string> classes_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct EncodedTargets {
  Matrix Y;                          // N×k one-hot, or N×1 regression values
  LabelCodec codec;                  // classification only
  std::vector<std::size_t> classes;  // classification only: class index per row
};

inline std::vector<double> parse_regression_targets(const std::vector<std::string>& raw) {
  std::vector<double> values;
  values.reserve(raw.size());
  for (std::size_t r = 0; r < raw.size(); ++r) {
    auto v = parse_number(raw[r]);
    if (!v) throw ParseError("row " + std::to_string(r + 1) + ": regression target '" + raw[r] + "' is not a number",
                             r + 1, "target");
    values.push_back(*v);
  }
  return values;
}

inline EncodedTargets encode_targets(const std::vector<std::string>& labels, TaskKind task) {
  if (labels.empty()) throw InvalidArgument("no targets to encode");
  EncodedTargets out;
  if (task == TaskKind::classification) {
    out.codec = LabelCodec::from_labels(labels);
    if (out.codec.size() < 2) throw InvalidArgument("classification needs at least two distinct classes");
    out.Y = out.codec.one_hot(labels);
    out.classes.reserve(labels.size());
    for (const auto& l : labels) out.classes.push_back(out.codec.index_of(l));
  } else {
    auto values = parse_regression_targets(labels);
    out.Y = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
  }
  return out;
}

}  // namespace examl
