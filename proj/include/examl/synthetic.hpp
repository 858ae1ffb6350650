#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "examl/csv.hpp"
#include "examl/linalg.hpp"
#include "examl/random.hpp"

namespace examl::synthetic {

struct Dataset {
  Matrix X;
  std::vector<std::string> y;
};

/// Two isotropic Gaussian blobs centred at (+c, +c) ("a") and (−c, −c) ("b"),
/// alternating class per row.
inline Dataset two_gaussians(std::size_t n, std::uint64_t seed, double center = 2.0, double sigma = 0.5) {
  CounterRng rng(seed);
  Dataset d{Matrix(static_cast<Eigen::Index>(n), 2), {}};
  for (std::size_t i = 0; i < n; ++i) {
    const bool first = i % 2 == 0;
    const double c = first ? center : -center;
    d.X(static_cast<Eigen::Index>(i), 0) = c + sigma * rng.normal();
    d.X(static_cast<Eigen::Index>(i), 1) = c + sigma * rng.normal();
    d.y.push_back(first ? "a" : "b");
  }
  return d;
}

/// y = sin(x), x uniform on [−π, π].
inline Dataset sine(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed);
  Dataset d{Matrix(static_cast<Eigen::Index>(n), 1), {}};
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.uniform(-std::numbers::pi, std::numbers::pi);
    d.X(static_cast<Eigen::Index>(i), 0) = x;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", std::sin(x));
    d.y.push_back(buf);
  }
  return d;
}

/// Independent standard-normal features and targets: nothing to learn.
inline Dataset pure_noise(std::size_t n, std::size_t features, std::uint64_t seed) {
  CounterRng rng(seed);
  Dataset d{Matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(features)), {}};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < features; ++j) d.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rng.normal();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", rng.normal());
    d.y.push_back(buf);
  }
  return d;
}

/// Three Gaussian classes in 4-D with 60/30/10 proportions.
inline Dataset imbalanced_three_class(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed);
  const double centers[3][4] = {{1.5, 0, 0, 0}, {0, 1.5, 0, 0}, {0, 0, 1.5, 1.5}};
  Dataset d{Matrix(static_cast<Eigen::Index>(n), 4), {}};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t slot = i % 10;
    const std::size_t c = slot < 6 ? 0 : (slot < 9 ? 1 : 2);
    for (int j = 0; j < 4; ++j) d.X(static_cast<Eigen::Index>(i), j) = centers[c][j] + 0.6 * rng.normal();
    d.y.push_back("class" + std::to_string(c));
  }
  return d;
}

inline RawTable to_table(const Dataset& d, std::string target_name = "target") {
  RawTable t;
  for (Eigen::Index j = 0; j < d.X.cols(); ++j) t.numeric_names.push_back("x" + std::to_string(j + 1));
  t.numeric = d.X;
  t.target_name = std::move(target_name);
  t.targets = d.y;
  return t;
}

}  // namespace examl::synthetic
