#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ndpc/rng.hpp"

namespace ndpc {

enum class ActivationKind : std::uint32_t { Sinusoidal = 0, LeakyRelu = 1 };

/// Hidden-layer nonlinearity: sin(x), or max(x, slope * x).
struct Activation {
  ActivationKind kind = ActivationKind::Sinusoidal;
  double slope = 0.01;

  static Activation sinusoidal() { return {ActivationKind::Sinusoidal, 0.01}; }
  static Activation leaky_relu(double slope = 0.01);
  /// "sin" or "leaky_relu".
  static Activation parse(const std::string& name);
  std::string name() const;

  bool operator==(const Activation&) const = default;
};

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

/// Fully connected network: activated hidden layers followed by a linear
/// output layer.
struct MlpParams {
  std::vector<DenseLayer> layers;
  Activation hidden;
  double omega0 = 1.0;

  int input_dim() const;
  int output_dim() const;
  std::vector<int> dims() const;
  std::size_t parameter_count() const;
  bool all_finite() const;

  /// Parameters in layer order: weights row-major, then bias.
  std::vector<double> flatten() const;
  void assign(std::span<const double> flat);
};

/// Gradients share the parameter layout.
using MlpGrads = std::vector<DenseLayer>;

MlpGrads zeros_like(const MlpParams& p);
std::vector<double> flatten(const MlpGrads& g);

/// Glorot-uniform weights (first layer additionally scaled by omega0 for
/// sinusoidal networks) and zero biases.
MlpParams init_mlp(std::span<const int> dims, Activation activation, RngStream& rng, double omega0 = 1.0);

/// Values kept from the forward pass for backpropagation.
struct MlpCache {
  std::vector<Eigen::MatrixXd> inputs;          // input to each layer
  std::vector<Eigen::MatrixXd> preactivations;  // hidden layers only
};

/// Batched forward pass; each column of `input` is one example.
Eigen::MatrixXd mlp_forward(const MlpParams& p, const Eigen::MatrixXd& input, MlpCache* cache = nullptr);

/// Single-example forward pass.
Eigen::VectorXd mlp_forward(const MlpParams& p, const Eigen::VectorXd& input);

/// Accumulates parameter gradients for dL/d(output) = grad_output into
/// `grads` (overwriting) and returns dL/d(input).
Eigen::MatrixXd mlp_backward(const MlpParams& p, const MlpCache& cache, const Eigen::MatrixXd& grad_output,
                             MlpGrads& grads);

}  // namespace ndpc
