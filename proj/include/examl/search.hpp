#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "examl/elm.hpp"
#include "examl/ensemble.hpp"
#include "examl/errors.hpp"
#include "examl/folds.hpp"
#include "examl/linalg.hpp"
#include "examl/parallel.hpp"
#include "examl/preprocess.hpp"
#include "examl/random.hpp"

namespace examl {

// Hyperparameter search: a (neurons × alpha) grid scored by inner k-fold CV of a
// single ELM per fold, then a full ensemble refit with the winner.

struct Candidate {
  std::size_t neurons = 0;
  double alpha = 0.0;
  friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct CandidateResult {
  Candidate candidate;
  std::vector<double> fold_scores;
  double mean_score = 0.0;
  double fit_seconds = 0.0;
};

struct SelectionReport {
  SearchMode mode = SearchMode::fast;
  std::size_t inner_folds = 0;
  std::vector<Candidate> grid;
  std::vector<CandidateResult> results;
  Candidate chosen;
  double total_seconds = 0.0;
};

struct GridShape {
  std::size_t neuron_points;
  std::size_t alpha_points;
};

inline constexpr GridShape grid_shape(SearchMode mode) {
  return mode == SearchMode::fast ? GridShape{5, 4} : GridShape{20, 10};
}

inline constexpr std::size_t kMinNeurons = 16;
inline constexpr std::size_t kMaxNeurons = 1024;
inline constexpr double kMinAlpha = 1e-8;
inline constexpr double kMaxAlpha = 1e2;

/// Largest neuron count the grid may use: min(1024, ⌊0.8·n_train⌋), at least 1.
inline std::size_t neuron_cap(std::size_t n_train) {
  return std::max<std::size_t>(1, std::min<std::size_t>(kMaxNeurons, (n_train * 4) / 5));
}

/// Log-spaced integer neuron counts in [min(16, cap), cap]. When the range holds
/// enough integers the rounded values are spread to be strictly increasing;
/// otherwise repeats are kept so the point count is preserved.
inline std::vector<std::size_t> neuron_axis(std::size_t points, std::size_t n_train) {
  const std::size_t hi = neuron_cap(n_train);
  const std::size_t lo = std::min(kMinNeurons, hi);
  std::vector<std::size_t> v(points);
  if (points == 0) return v;
  if (points == 1) {
    v[0] = lo;
    return v;
  }
  const double ratio = static_cast<double>(hi) / static_cast<double>(lo);
  for (std::size_t i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(points - 1);
    const auto r = static_cast<std::size_t>(std::llround(static_cast<double>(lo) * std::pow(ratio, t)));
    v[i] = std::clamp(r, lo, hi);
  }
  if (hi - lo + 1 >= points) {
    for (std::size_t i = 1; i < points; ++i) v[i] = std::max(v[i], v[i - 1] + 1);
    v[points - 1] = std::min(v[points - 1], hi);
    for (std::size_t i = points - 1; i-- > 0;) v[i] = std::min(v[i], v[i + 1] - 1);
  }
  return v;
}

/// Log-spaced from 1e-8 to 1e2 inclusive.
inline std::vector<double> alpha_axis(std::size_t points) {
  std::vector<double> a(points);
  const double lo = std::log10(kMinAlpha), hi = std::log10(kMaxAlpha);
  for (std::size_t i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
    a[i] = std::pow(10.0, lo + t * (hi - lo));
  }
  if (points >= 1) a.front() = kMinAlpha;
  if (points >= 2) a.back() = kMaxAlpha;
  return a;
}

/// Neuron-major grid: all alphas for the first neuron count, then the next.
inline std::vector<Candidate> build_grid(SearchMode mode, std::size_t n_train, std::size_t /*n_features*/) {
  if (n_train < 2) throw InvalidArgument("grid search needs at least 2 training rows");
  const auto shape = grid_shape(mode);
  std::vector<Candidate> grid;
  grid.reserve(shape.neuron_points * shape.alpha_points);
  const auto alphas = alpha_axis(shape.alpha_points);
  for (auto m : neuron_axis(shape.neuron_points, n_train))
    for (double a : alphas) grid.push_back({m, a});
  return grid;
}

struct SearchSettings {
  std::size_t inner_folds = 5;
  std::uint64_t base_seed = 0;
  double weight_scale = 1.0;
  Activation activation = Activation::tanh;
  std::size_t threads = 1;
};

namespace detail {

struct InnerFold {
  Matrix X_train, Y_train, X_val, Y_val;
  std::vector<std::size_t> val_classes;
};

inline std::vector<InnerFold> make_inner_folds(const Matrix& X, const Matrix& Y, TaskKind task,
                                               std::size_t inner_folds, std::uint64_t seed) {
  if (inner_folds < 2) throw InvalidArgument("inner cross-validation needs at least 2 folds");
  if (static_cast<std::size_t>(X.rows()) < inner_folds)
    throw InvalidArgument("inner cross-validation: " + std::to_string(X.rows()) + " rows for " +
                          std::to_string(inner_folds) + " folds");
  if (X.rows() != Y.rows()) throw InvalidArgument("feature/target row mismatch");
  const auto plan = kfold_split(static_cast<std::size_t>(X.rows()), inner_folds, seed);
  std::vector<InnerFold> folds;
  for (std::size_t f = 0; f < inner_folds; ++f) {
    const auto tr = plan.train_indices(f), va = plan.test_indices(f);
    InnerFold fold{take_rows(X, tr), take_rows(Y, tr), take_rows(X, va), take_rows(Y, va), {}};
    if (task == TaskKind::classification) fold.val_classes = argmax_rows(fold.Y_val);
    folds.push_back(std::move(fold));
  }
  return folds;
}

// Accuracy for classification, negative RMSE over all outputs for regression.
inline double fold_score(const Matrix& pred, const InnerFold& fold, TaskKind task) {
  if (task == TaskKind::classification) {
    const auto labels = argmax_rows(pred);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) hits += labels[i] == fold.val_classes[i];
    return static_cast<double>(hits) / static_cast<double>(labels.size());
  }
  return -std::sqrt((pred - fold.Y_val).squaredNorm() / static_cast<double>(pred.size()));
}

struct BlockResult {
  std::vector<double> scores;   // one per alpha
  std::vector<double> seconds;  // one per alpha, shared setup split evenly
};

// One neuron count on one fold, every requested alpha. The hidden layer for fold f
// is seeded with derive_member_seed(base_seed, f), independent of alpha.
inline BlockResult evaluate_block(const InnerFold& fold, std::size_t fold_index, std::size_t neurons,
                                  const std::vector<double>& alphas, TaskKind task, const SearchSettings& s) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  ElmConfig config{neurons, 0.0, s.activation, s.weight_scale, derive_member_seed(s.base_seed, fold_index)};
  const auto layer = init_hidden_layer(config, fold.X_train.cols());
  const Matrix H_train = hidden_map(fold.X_train, layer.weights, layer.biases, s.activation);
  const Matrix H_val = hidden_map(fold.X_val, layer.weights, layer.biases, s.activation);
  const RidgePath path(H_train, fold.Y_train);
  const double setup = std::chrono::duration<double>(clock::now() - t0).count() / static_cast<double>(alphas.size());

  BlockResult out;
  for (double alpha : alphas) {
    const auto t1 = clock::now();
    out.scores.push_back(fold_score(H_val * path.solve(alpha), fold, task));
    out.seconds.push_back(setup + std::chrono::duration<double>(clock::now() - t1).count());
  }
  return out;
}

inline std::vector<CandidateResult> evaluate_on_folds(const std::vector<InnerFold>& folds,
                                                      const std::vector<Candidate>& grid, TaskKind task,
                                                      const SearchSettings& s) {
  // Group by neuron count so each hidden layer and factorization is built once per fold.
  std::map<std::size_t, std::vector<double>> alphas_by_neurons;
  for (const auto& c : grid) {
    auto& list = alphas_by_neurons[c.neurons];
    if (std::find(list.begin(), list.end(), c.alpha) == list.end()) list.push_back(c.alpha);
  }
  std::vector<std::pair<std::size_t, const std::vector<double>*>> groups;
  for (const auto& [m, list] : alphas_by_neurons) groups.emplace_back(m, &list);

  const std::size_t tasks = groups.size() * folds.size();
  std::vector<BlockResult> blocks(tasks);
  parallel_for(tasks, s.threads, [&](std::size_t t) {
    const std::size_t g = t / folds.size(), f = t % folds.size();
    blocks[t] = evaluate_block(folds[f], f, groups[g].first, *groups[g].second, task, s);
  });

  std::vector<CandidateResult> results;
  results.reserve(grid.size());
  for (const auto& c : grid) {
    const auto g = static_cast<std::size_t>(
        std::distance(alphas_by_neurons.begin(), alphas_by_neurons.find(c.neurons)));
    const auto& list = *groups[g].second;
    const auto a = static_cast<std::size_t>(std::distance(list.begin(), std::find(list.begin(), list.end(), c.alpha)));
    CandidateResult r{c, {}, 0.0, 0.0};
    for (std::size_t f = 0; f < folds.size(); ++f) {
      const auto& block = blocks[g * folds.size() + f];
      r.fold_scores.push_back(block.scores[a]);
      r.fit_seconds += block.seconds[a];
    }
    r.mean_score = std::accumulate(r.fold_scores.begin(), r.fold_scores.end(), 0.0) /
                   static_cast<double>(r.fold_scores.size());
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace detail

/// Scores every grid point. X and Y are already in model units (standardized
/// features, one-hot or standardized targets). Results come back in grid order.
inline std::vector<CandidateResult> evaluate_grid(const Matrix& X, const Matrix& Y, const std::vector<Candidate>& grid,
                                                  TaskKind task, const SearchSettings& settings) {
  for (const auto& c : grid)
    if (c.neurons < 1 || !(c.alpha >= 0.0)) throw InvalidArgument("invalid grid candidate");
  const auto folds = detail::make_inner_folds(X, Y, task, settings.inner_folds, settings.base_seed);
  return detail::evaluate_on_folds(folds, grid, task, settings);
}

inline CandidateResult evaluate_candidate(const Matrix& X, const Matrix& Y, const Candidate& candidate, TaskKind task,
                                          std::size_t inner_folds, std::uint64_t base_seed,
                                          SearchSettings settings = {}) {
  settings.inner_folds = inner_folds;
  settings.base_seed = base_seed;
  return evaluate_grid(X, Y, {candidate}, task, settings).front();
}

/// Highest mean score; ties prefer fewer neurons, then larger alpha, then grid order.
inline Candidate select_best(const std::vector<CandidateResult>& results) {
  if (results.empty()) throw InvalidArgument("select_best: no candidate results");
  const CandidateResult* best = &results.front();
  for (const auto& r : results) {
    const bool better = r.mean_score > best->mean_score ||
                        (r.mean_score == best->mean_score &&
                         (r.candidate.neurons < best->candidate.neurons ||
                          (r.candidate.neurons == best->candidate.neurons && r.candidate.alpha > best->candidate.alpha)));
    if (better) best = &r;
  }
  return best->candidate;
}

struct AutoMlOptions {
  SearchMode mode = SearchMode::fast;
  std::size_t ensemble_size = 7;
  std::uint64_t seed = 0;
  std::size_t inner_folds = 5;
  double weight_scale = 1.0;
  std::size_t threads = 1;
};

struct AutoMlResult {
  EnsembleModel model;
  SelectionReport report;
  double selection_seconds = 0.0;
  double final_fit_seconds = 0.0;
  double training_seconds = 0.0;  // selection + final fit
};

/// Seed used for the inner-CV fold plan and fold hidden layers.
inline std::uint64_t selection_seed(std::uint64_t seed) { return mix64(seed ^ 0x5e1ec7ULL); }

/// Standardize, encode, grid search, refit. The ensemble's members are seeded from
/// `seed`; the returned scaler is fit on exactly X_raw.
inline AutoMlResult fit_automl(const Matrix& X_raw, const std::vector<std::string>& y_raw, TaskKind task,
                               const AutoMlOptions& options) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  if (X_raw.rows() < 2 || X_raw.cols() < 1) throw InvalidArgument("fit_automl needs at least 2 rows and 1 feature");
  if (static_cast<std::size_t>(X_raw.rows()) != y_raw.size())
    throw InvalidArgument("fit_automl: " + std::to_string(X_raw.rows()) + " feature rows vs " +
                          std::to_string(y_raw.size()) + " targets");
  require_finite(X_raw, "feature matrix");
  if (options.ensemble_size < 1) throw InvalidArgument("ensemble size must be >= 1");

  AutoMlResult out;
  EnsembleModel& model = out.model;
  model.task = task;
  model.mode = options.mode;
  model.base_seed = options.seed;
  model.scaler = standardize_fit(X_raw);
  const Matrix Z = standardize_apply(X_raw, model.scaler);

  auto targets = encode_targets(y_raw, task);
  Matrix Y = std::move(targets.Y);
  if (task == TaskKind::classification) {
    model.codec = std::move(targets.codec);
  } else {
    model.target_mean = Y.mean();
    model.target_std = std::max(kStdFloor, std::sqrt((Y.array() - model.target_mean).square().mean()));
    Y = ((Y.array() - model.target_mean) / model.target_std).matrix();
  }

  const auto n = static_cast<std::size_t>(X_raw.rows());
  SelectionReport& report = out.report;
  report.mode = options.mode;
  report.inner_folds = std::min(options.inner_folds, n);
  report.grid = build_grid(options.mode, n, static_cast<std::size_t>(X_raw.cols()));
  SearchSettings settings{report.inner_folds, selection_seed(options.seed), options.weight_scale, Activation::tanh,
                          options.threads};
  report.results = evaluate_grid(Z, Y, report.grid, task, settings);
  report.chosen = select_best(report.results);
  const auto t1 = clock::now();
  report.total_seconds = std::chrono::duration<double>(t1 - t0).count();

  if (model.scaler.provenance != fingerprint(X_raw))
    throw InvalidState("scaler statistics were not fit on the final training matrix");
  model.chosen_config = ElmConfig{report.chosen.neurons, report.chosen.alpha, Activation::tanh, options.weight_scale, 0};
  model.members = train_ensemble(Z, Y, model.chosen_config, options.ensemble_size, options.seed, options.threads);
  const auto t2 = clock::now();

  out.selection_seconds = report.total_seconds;
  out.final_fit_seconds = std::chrono::duration<double>(t2 - t1).count();
  out.training_seconds = std::chrono::duration<double>(t2 - t0).count();
  return out;
}

}  // namespace examl
