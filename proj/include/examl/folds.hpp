#pragma once

#include <cstdint>
#include <vector>

#include "examl/errors.hpp"
#include "examl/linalg.hpp"
#include "examl/random.hpp"

namespace examl {

struct FoldPlan {
  std::size_t n = 0;
  std::size_t k = 0;
  std::vector<std::size_t> assignment;  // fold index per sample

  std::vector<std::size_t> test_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i)
      if (assignment[i] == fold) out.push_back(i);
    return out;
  }

  std::vector<std::size_t> train_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i)
      if (assignment[i] != fold) out.push_back(i);
    return out;
  }
};

/// Seeded shuffle, then round-robin: the sample at shuffled position p goes to fold p mod k.
inline FoldPlan kfold_split(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw InvalidArgument("k-fold needs k >= 2, got " + std::to_string(k));
  if (k > n) throw InvalidArgument("k-fold needs k <= n, got k=" + std::to_string(k) + ", n=" + std::to_string(n));
  FoldPlan plan{n, k, std::vector<std::size_t>(n)};
  const auto order = seeded_permutation(n, seed);
  for (std::size_t p = 0; p < n; ++p) plan.assignment[order[p]] = p % k;
  return plan;
}

inline Matrix take_rows(const Matrix& X, const std::vector<std::size_t>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t r = 0; r < rows.size(); ++r)
    out.row(static_cast<Eigen::Index>(r)) = X.row(static_cast<Eigen::Index>(rows[r]));
  return out;
}

template <typename T>
std::vector<T> take(const std::vector<T>& v, const std::vector<std::size_t>& rows) {
  std::vector<T> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(v[r]);
  return out;
}

struct AugmentationSpec {
  std::size_t duplication_factor = 2;
  double noise_fraction = 0.001;

  void validate() const {
    if (duplication_factor < 1) throw InvalidArgument("duplication_factor must be >= 1");
    if (!(noise_fraction >= 0.0 && noise_fraction < 1.0)) throw InvalidArgument("noise_fraction must be in [0, 1)");
  }
};

struct Augmented {
  Matrix X;
  std::vector<std::size_t> source;  // original row index of every output row
};

/// Originals verbatim, then (factor − 1) copies in which each cell moves by a
/// uniform draw in [−f·σ_j, +f·σ_j], σ_j the population std of column j.
inline Augmented augment_duplicate_noise(const Matrix& X, const AugmentationSpec& spec, std::uint64_t seed) {
  spec.validate();
  const Eigen::Index n = X.rows();
  Augmented out{Matrix(n * static_cast<Eigen::Index>(spec.duplication_factor), X.cols()), {}};
  out.source.reserve(static_cast<std::size_t>(out.X.rows()));
  if (n == 0) return out;
  out.X.topRows(n) = X;
  for (Eigen::Index i = 0; i < n; ++i) out.source.push_back(static_cast<std::size_t>(i));

  const Vector sigma =
      ((X.rowwise() - X.colwise().mean()).array().square().colwise().mean().sqrt()).transpose();
  CounterRng rng(seed);
  for (std::size_t copy = 1; copy < spec.duplication_factor; ++copy) {
    const Eigen::Index base = static_cast<Eigen::Index>(copy) * n;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double half = spec.noise_fraction * sigma(j);
        out.X(base + i, j) = X(i, j) + rng.uniform(-half, half);
      }
      out.source.push_back(static_cast<std::size_t>(i));
    }
  }
  return out;
}

template <typename T>
std::pair<Matrix, std::vector<T>> augment_duplicate_noise(const Matrix& X, const std::vector<T>& y,
                                                          const AugmentationSpec& spec, std::uint64_t seed) {
  if (y.size() != static_cast<std::size_t>(X.rows())) throw InvalidArgument("augment: feature/target row mismatch");
  auto aug = augment_duplicate_noise(X, spec, seed);
  return {std::move(aug.X), take(y, aug.source)};
}

}  // namespace examl
