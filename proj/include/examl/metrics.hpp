#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "examl/errors.hpp"

namespace examl {

/// counts[t][p]: samples of true class t predicted as p.
struct ConfusionMatrix {
  std::size_t k = 0;
  std::vector<std::vector<std::uint64_t>> counts;

  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (const auto& row : counts) t = std::accumulate(row.begin(), row.end(), t);
    return t;
  }
  std::uint64_t tp(std::size_t c) const { return counts[c][c]; }
  std::uint64_t row_sum(std::size_t c) const { return std::accumulate(counts[c].begin(), counts[c].end(), std::uint64_t{0}); }
  std::uint64_t col_sum(std::size_t c) const {
    std::uint64_t s = 0;
    for (const auto& row : counts) s += row[c];
    return s;
  }
  std::uint64_t fp(std::size_t c) const { return col_sum(c) - tp(c); }
  std::uint64_t fn(std::size_t c) const { return row_sum(c) - tp(c); }

  ConfusionMatrix& operator+=(const ConfusionMatrix& other) {
    if (other.k != k) throw InvalidArgument("cannot add confusion matrices of different class counts");
    for (std::size_t t = 0; t < k; ++t)
      for (std::size_t p = 0; p < k; ++p) counts[t][p] += other.counts[t][p];
    return *this;
  }

  static ConfusionMatrix zeros(std::size_t k) { return {k, std::vector<std::vector<std::uint64_t>>(k, std::vector<std::uint64_t>(k, 0))}; }
};

inline ConfusionMatrix confusion_matrix(std::span<const std::size_t> y_true, std::span<const std::size_t> y_pred,
                                        std::size_t k) {
  if (y_true.size() != y_pred.size())
    throw InvalidArgument("confusion_matrix: " + std::to_string(y_true.size()) + " true labels vs " +
                          std::to_string(y_pred.size()) + " predictions");
  if (y_true.empty()) throw InvalidArgument("confusion_matrix: no samples");
  auto cm = ConfusionMatrix::zeros(k);
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] >= k || y_pred[i] >= k)
      throw InvalidArgument("confusion_matrix: label out of range [0, " + std::to_string(k) + ")");
    ++cm.counts[y_true[i]][y_pred[i]];
  }
  return cm;
}

inline double accuracy(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  if (total == 0) throw InvalidState("accuracy of an empty confusion matrix");
  std::uint64_t trace = 0;
  for (std::size_t c = 0; c < cm.k; ++c) trace += cm.tp(c);
  return static_cast<double>(trace) / static_cast<double>(total);
}

struct PerClass {
  std::vector<double> values;
  std::vector<bool> empty_class;  // class absent from truth and never predicted
};

/// J_c = TP / (TP + FP + FN). A class with an empty union gets J = 1 and a flag.
inline PerClass jaccard_per_class(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw InvalidState("jaccard of an empty confusion matrix");
  PerClass out{std::vector<double>(cm.k), std::vector<bool>(cm.k)};
  for (std::size_t c = 0; c < cm.k; ++c) {
    const auto denom = cm.tp(c) + cm.fp(c) + cm.fn(c);
    out.empty_class[c] = denom == 0;
    out.values[c] = denom == 0 ? 1.0 : static_cast<double>(cm.tp(c)) / static_cast<double>(denom);
  }
  return out;
}

/// F1_c = 2·TP / (2·TP + FP + FN), same empty-class convention as Jaccard.
inline PerClass f1_per_class(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw InvalidState("F1 of an empty confusion matrix");
  PerClass out{std::vector<double>(cm.k), std::vector<bool>(cm.k)};
  for (std::size_t c = 0; c < cm.k; ++c) {
    const auto denom = 2 * cm.tp(c) + cm.fp(c) + cm.fn(c);
    out.empty_class[c] = denom == 0;
    out.values[c] = denom == 0 ? 1.0 : 2.0 * static_cast<double>(cm.tp(c)) / static_cast<double>(denom);
  }
  return out;
}

// Population variance.
inline double jaccard_variance(std::span<const double> j) {
  if (j.empty()) throw InvalidArgument("variance of an empty vector");
  const double mean = std::accumulate(j.begin(), j.end(), 0.0) / static_cast<double>(j.size());
  double ss = 0.0;
  for (double v : j) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(j.size());
}

inline double pearson_r(std::span<const double> y, std::span<const double> y_hat) {
  if (y.size() != y_hat.size()) throw InvalidArgument("pearson_r: length mismatch");
  if (y.size() < 2) throw InvalidArgument("pearson_r needs at least two samples");
  const double n = static_cast<double>(y.size());
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  const double mh = std::accumulate(y_hat.begin(), y_hat.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double a = y[i] - my, b = y_hat[i] - mh;
    sxy += a * b;
    sxx += a * a;
    syy += b * b;
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateInput("pearson_r undefined: an input has zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

inline double rmse(std::span<const double> y, std::span<const double> y_hat) {
  if (y.size() != y_hat.size()) throw InvalidArgument("rmse: length mismatch");
  if (y.empty()) throw InvalidArgument("rmse of no samples");
  double ss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) ss += (y[i] - y_hat[i]) * (y[i] - y_hat[i]);
  return std::sqrt(ss / static_cast<double>(y.size()));
}

struct ClassificationReport {
  double accuracy = 0.0;
  std::vector<double> jaccard;
  double jaccard_variance = 0.0;
  double jaccard_min = 0.0;
  std::vector<double> f1;
  std::vector<bool> empty_class_flags;
};

inline ClassificationReport classification_report(const ConfusionMatrix& cm) {
  ClassificationReport r;
  r.accuracy = accuracy(cm);
  auto j = jaccard_per_class(cm);
  auto f = f1_per_class(cm);
  r.jaccard = std::move(j.values);
  r.empty_class_flags = std::move(j.empty_class);
  r.f1 = std::move(f.values);
  r.jaccard_variance = jaccard_variance(r.jaccard);
  r.jaccard_min = *std::min_element(r.jaccard.begin(), r.jaccard.end());
  return r;
}

struct RegressionReport {
  double pearson_r = 0.0;
  double rmse = 0.0;
};

inline RegressionReport regression_report(std::span<const double> y, std::span<const double> y_hat) {
  return {pearson_r(y, y_hat), rmse(y, y_hat)};
}

}  // namespace examl
