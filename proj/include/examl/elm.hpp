#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "examl/errors.hpp"
#include "examl/linalg.hpp"
#include "examl/random.hpp"

namespace examl {

// Hidden-layer activations. Every entry must be smooth, monotonic and bounded in [-1, 1].
enum class Activation { tanh };

inline double activate(Activation a, double z) noexcept {
  switch (a) {
    case Activation::tanh: return std::tanh(z);
  }
  return 0.0;
}

inline double activate_derivative(Activation a, double z) noexcept {
  switch (a) {
    case Activation::tanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
  }
  return 0.0;
}

inline std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::tanh: return "tanh";
  }
  return "unknown";
}

inline std::optional<Activation> parse_activation(std::string_view name) {
  if (name == "tanh") return Activation::tanh;
  return std::nullopt;
}

struct ElmConfig {
  std::size_t neurons = 64;
  double alpha = 1e-6;
  Activation activation = Activation::tanh;
  double weight_scale = 1.0;  // half-width of the uniform weight and bias draw
  std::uint64_t seed = 0;

  void validate() const {
    if (neurons < 1) throw InvalidArgument("ELM needs at least one hidden neuron");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidArgument("ELM alpha must be finite and >= 0");
    if (!(weight_scale > 0.0) || !std::isfinite(weight_scale))
      throw InvalidArgument("ELM weight_scale must be finite and > 0");
  }
};

struct HiddenLayer {
  Matrix weights;  // n_inputs × neurons
  Vector biases;   // neurons
};

struct ElmModel {
  Matrix weights;  // n_inputs × neurons
  Vector biases;   // neurons
  Matrix beta;     // neurons × n_outputs
  Activation activation = Activation::tanh;

  Eigen::Index n_inputs() const { return weights.rows(); }
  Eigen::Index neurons() const { return weights.cols(); }
  Eigen::Index n_outputs() const { return beta.cols(); }

  void validate() const {
    if (biases.size() != weights.cols() || beta.rows() != weights.cols())
      throw InvalidArgument("ELM shape mismatch between weights, biases and output weights");
    require_finite(weights, "ELM input weights");
    require_finite(biases, "ELM biases");
    require_finite(beta, "ELM output weights");
  }
};

/// Draws input weights then biases, i.i.d. uniform on [-s, s), from the counter
/// stream of config.seed: W(i, j) uses draw i·m + j, b(j) uses draw n·m + j.
inline HiddenLayer init_hidden_layer(const ElmConfig& config, Eigen::Index n_inputs) {
  config.validate();
  if (n_inputs < 1) throw InvalidArgument("ELM needs at least one input feature");
  const auto m = static_cast<Eigen::Index>(config.neurons);
  const double s = config.weight_scale;
  CounterRng rng(config.seed);
  HiddenLayer layer{Matrix(n_inputs, m), Vector(m)};
  for (Eigen::Index i = 0; i < n_inputs; ++i)
    for (Eigen::Index j = 0; j < m; ++j) layer.weights(i, j) = rng.uniform(-s, s);
  for (Eigen::Index j = 0; j < m; ++j) layer.biases(j) = rng.uniform(-s, s);
  return layer;
}

/// H(s, j) = g(Σ_i X(s, i)·W(i, j) + b(j)).
inline Matrix hidden_map(const Matrix& X, const Matrix& W, const Vector& b, Activation g) {
  if (X.cols() != W.rows())
    throw InvalidArgument("hidden_map: X has " + std::to_string(X.cols()) + " columns, W has " +
                          std::to_string(W.rows()) + " rows");
  if (b.size() != W.cols()) throw InvalidArgument("hidden_map: bias length differs from neuron count");
  Matrix H = X * W;
  H.rowwise() += b.transpose();
  H = H.unaryExpr([g](double z) { return activate(g, z); });
  return H;
}

inline ElmModel train_elm(const Matrix& X, const Matrix& Y, const ElmConfig& config) {
  if (X.rows() == 0) throw InvalidArgument("cannot train an ELM on zero samples");
  if (X.rows() != Y.rows())
    throw InvalidArgument("train_elm: X has " + std::to_string(X.rows()) + " rows, Y has " +
                          std::to_string(Y.rows()));
  auto layer = init_hidden_layer(config, X.cols());
  Matrix H = hidden_map(X, layer.weights, layer.biases, config.activation);
  Matrix beta = ridge_solve(H, Y, config.alpha);
  return ElmModel{std::move(layer.weights), std::move(layer.biases), std::move(beta), config.activation};
}

/// Raw output scores, no thresholding.
inline Matrix predict_elm(const ElmModel& model, const Matrix& X) {
  if (X.cols() != model.n_inputs())
    throw InvalidArgument("predict_elm: model expects " + std::to_string(model.n_inputs()) +
                          " inputs, got " + std::to_string(X.cols()));
  return hidden_map(X, model.weights, model.biases, model.activation) * model.beta;
}

}  // namespace examl
