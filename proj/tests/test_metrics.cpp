#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "examl/errors.hpp"
#include "examl/metrics.hpp"

using namespace examl;

namespace {
ConfusionMatrix from_counts(std::vector<std::vector<std::uint64_t>> c) { return {c.size(), std::move(c)}; }
}  // namespace

TEST(ConfusionMatrix, PerfectPredictionIsDiagonal) {
  std::vector<std::size_t> y{0, 1, 2, 1};
  auto cm = confusion_matrix(y, y, 3);
  EXPECT_EQ(cm.counts, (std::vector<std::vector<std::uint64_t>>{{1, 0, 0}, {0, 2, 0}, {0, 0, 1}}));
  EXPECT_EQ(cm.total(), 4u);
}

TEST(ConfusionMatrix, HandTally) {
  std::vector<std::size_t> t{0, 0, 1, 1}, p{0, 1, 0, 1};
  EXPECT_EQ(confusion_matrix(t, p, 2).counts, (std::vector<std::vector<std::uint64_t>>{{1, 1}, {1, 1}}));
}

TEST(ConfusionMatrix, RejectsBadInput) {
  std::vector<std::size_t> empty, one{0}, two{0, 1}, bad{0, 5};
  EXPECT_THROW(confusion_matrix(empty, empty, 2), InvalidArgument);
  EXPECT_THROW(confusion_matrix(one, two, 2), InvalidArgument);
  EXPECT_THROW(confusion_matrix(two, bad, 2), InvalidArgument);
}

TEST(Accuracy, Examples) {
  EXPECT_EQ(accuracy(from_counts({{3, 0}, {0, 4}})), 1.0);
  EXPECT_EQ(accuracy(from_counts({{1, 1}, {1, 1}})), 0.5);
  EXPECT_EQ(accuracy(from_counts({{0, 3}, {0, 0}})), 0.0);
  EXPECT_THROW(accuracy(ConfusionMatrix::zeros(2)), InvalidState);
}

TEST(Jaccard, Examples) {
  auto perfect = jaccard_per_class(from_counts({{2, 0}, {0, 5}}));
  EXPECT_EQ(perfect.values, (std::vector<double>{1.0, 1.0}));
  auto even = jaccard_per_class(from_counts({{1, 1}, {1, 1}}));
  EXPECT_DOUBLE_EQ(even.values[0], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(even.values[1], 1.0 / 3.0);
  auto absent = jaccard_per_class(from_counts({{2, 1, 0}, {0, 3, 0}, {0, 0, 0}}));
  EXPECT_EQ(absent.values[2], 1.0);
  EXPECT_TRUE(absent.empty_class[2]);
  EXPECT_FALSE(absent.empty_class[0]);
}

TEST(F1, Examples) {
  auto even = f1_per_class(from_counts({{1, 1}, {1, 1}}));
  EXPECT_DOUBLE_EQ(even.values[0], 0.5);
  EXPECT_DOUBLE_EQ(even.values[0] / (2.0 - even.values[0]), 1.0 / 3.0);
  auto none = f1_per_class(from_counts({{0, 2}, {3, 0}}));
  EXPECT_EQ(none.values[0], 0.0);
  EXPECT_EQ(f1_per_class(from_counts({{4, 0}, {0, 1}})).values, (std::vector<double>{1.0, 1.0}));
}

TEST(JaccardVariance, Examples) {
  EXPECT_EQ(jaccard_variance(std::vector<double>{0.3, 0.3, 0.3}), 0.0);
  EXPECT_DOUBLE_EQ(jaccard_variance(std::vector<double>{0.0, 1.0}), 0.25);
  EXPECT_EQ(jaccard_variance(std::vector<double>{1.0 / 3, 1.0 / 3}), 0.0);
  EXPECT_THROW(jaccard_variance(std::vector<double>{}), InvalidArgument);
}

TEST(Pearson, Examples) {
  std::vector<double> y{1, 2, 3, 5}, neg{-1, -2, -3, -5};
  EXPECT_NEAR(pearson_r(y, y), 1.0, 1e-15);
  EXPECT_NEAR(pearson_r(y, neg), -1.0, 1e-15);
  EXPECT_NEAR(pearson_r(std::vector<double>{1, 2, 3}, std::vector<double>{2, 4, 6}), 1.0, 1e-15);
  EXPECT_THROW(pearson_r(std::vector<double>{1, 1, 1}, y), InvalidArgument);
  EXPECT_THROW(pearson_r(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), DegenerateInput);
}

TEST(Pearson, InvariantUnderPositiveAffineMaps) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  std::vector<double> y(50), h(50);
  for (int i = 0; i < 50; ++i) {
    y[i] = n(rng);
    h[i] = y[i] + 0.5 * n(rng);
  }
  const double r = pearson_r(y, h);
  for (auto [a, b] : {std::pair{2.0, 1.0}, std::pair{0.01, -300.0}, std::pair{1e4, 5.0}}) {
    std::vector<double> ya(50), ha(50);
    for (int i = 0; i < 50; ++i) {
      ya[i] = a * y[i] + b;
      ha[i] = a * h[i] + b;
    }
    EXPECT_NEAR(pearson_r(ya, h), r, 1e-12);
    EXPECT_NEAR(pearson_r(y, ha), r, 1e-12);
  }
}

TEST(MetricProperties, JaccardF1IdentityOnRandomMatrices) {
  std::mt19937_64 rng(100);
  std::uniform_int_distribution<int> kdist(2, 8), cdist(0, 30);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = kdist(rng);
    auto cm = ConfusionMatrix::zeros(static_cast<std::size_t>(k));
    for (auto& row : cm.counts)
      for (auto& c : row) c = static_cast<std::uint64_t>(cdist(rng) * (cdist(rng) > 10));
    cm.counts[0][0] += 1;
    auto j = jaccard_per_class(cm);
    auto f = f1_per_class(cm);
    std::uint64_t trace = 0;
    for (int c = 0; c < k; ++c) trace += cm.tp(static_cast<std::size_t>(c));
    EXPECT_DOUBLE_EQ(accuracy(cm), static_cast<double>(trace) / static_cast<double>(cm.total()));
    for (int c = 0; c < k; ++c) {
      if (j.empty_class[c]) continue;
      EXPECT_NEAR(j.values[c], f.values[c] / (2.0 - f.values[c]), 1e-15);
      EXPECT_LE(0.0, j.values[c]);
      EXPECT_LE(j.values[c], f.values[c]);
      EXPECT_LE(f.values[c], 1.0);
    }
    // Ranking classes by Jaccard equals ranking by F1.
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        if (!j.empty_class[a] && !j.empty_class[b])
          EXPECT_EQ(j.values[a] < j.values[b], f.values[a] < f.values[b]);
  }
}

TEST(ClassificationReport, SummaryStatistics) {
  auto r = classification_report(from_counts({{5, 1, 0}, {2, 3, 1}, {0, 0, 4}}));
  EXPECT_DOUBLE_EQ(r.accuracy, 12.0 / 16.0);
  double mean = 0.0;
  for (double v : r.jaccard) mean += v / 3.0;
  double var = 0.0;
  for (double v : r.jaccard) var += (v - mean) * (v - mean) / 3.0;
  EXPECT_NEAR(r.jaccard_variance, var, 1e-12);
  EXPECT_EQ(r.jaccard_min, *std::min_element(r.jaccard.begin(), r.jaccard.end()));
}
