#include "ndpc/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "vecmath.hpp"

namespace ndpc {

Activation Activation::leaky_relu(double slope) {
  if (!(slope > 0.0 && slope < 1.0)) throw std::invalid_argument("leaky ReLU slope must lie in (0, 1)");
  return {ActivationKind::LeakyRelu, slope};
}

Activation Activation::parse(const std::string& name) {
  if (name == "sin" || name == "sinusoidal") return sinusoidal();
  if (name == "leaky_relu" || name == "leaky-relu") return leaky_relu();
  throw std::invalid_argument("unknown activation '" + name + "' (expected sin or leaky_relu)");
}

std::string Activation::name() const { return kind == ActivationKind::Sinusoidal ? "sin" : "leaky_relu"; }

int MlpParams::input_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.front().weight.cols()); }

int MlpParams::output_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.back().weight.rows()); }

std::vector<int> MlpParams::dims() const {
  std::vector<int> d;
  if (layers.empty()) return d;
  d.push_back(input_dim());
  for (const auto& l : layers) d.push_back(static_cast<int>(l.weight.rows()));
  return d;
}

std::size_t MlpParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

bool MlpParams::all_finite() const {
  for (const auto& l : layers)
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  return true;
}

namespace {

void append_layers(const std::vector<DenseLayer>& layers, std::vector<double>& out) {
  for (const auto& l : layers) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) out.push_back(l.weight(r, c));
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) out.push_back(l.bias(r));
  }
}

}  // namespace

std::vector<double> MlpParams::flatten() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  append_layers(layers, out);
  return out;
}

void MlpParams::assign(std::span<const double> flat) {
  if (flat.size() != parameter_count()) throw std::invalid_argument("MlpParams::assign: size mismatch");
  std::size_t i = 0;
  for (auto& l : layers) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = flat[i++];
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = flat[i++];
  }
}

MlpGrads zeros_like(const MlpParams& p) {
  MlpGrads g;
  for (const auto& l : p.layers)
    g.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()), Eigen::VectorXd::Zero(l.bias.size())});
  return g;
}

std::vector<double> flatten(const MlpGrads& g) {
  std::vector<double> out;
  append_layers(g, out);
  return out;
}

MlpParams init_mlp(std::span<const int> dims, Activation activation, RngStream& rng, double omega0) {
  if (dims.size() < 2) throw std::invalid_argument("init_mlp: need at least input and output dimensions");
  for (int d : dims)
    if (d < 1) throw std::invalid_argument("init_mlp: layer dimensions must be positive");
  if (!(omega0 > 0.0)) throw std::invalid_argument("init_mlp: omega0 must be positive");
  MlpParams p;
  p.hidden = activation;
  p.omega0 = omega0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int in = dims[l], out = dims[l + 1];
    double limit = std::sqrt(6.0 / (in + out));
    if (l == 0 && activation.kind == ActivationKind::Sinusoidal) limit *= omega0;
    DenseLayer layer{Eigen::MatrixXd(out, in), Eigen::VectorXd::Zero(out)};
    for (int r = 0; r < out; ++r)
      for (int c = 0; c < in; ++c) layer.weight(r, c) = limit * (2.0 * rng.next_uniform() - 1.0);
    p.layers.push_back(std::move(layer));
  }
  return p;
}

Eigen::MatrixXd mlp_forward(const MlpParams& p, const Eigen::MatrixXd& input, MlpCache* cache) {
  if (p.layers.empty()) throw std::invalid_argument("mlp_forward: empty network");
  if (input.rows() != p.input_dim()) throw std::invalid_argument("mlp_forward: input dimension mismatch");
  if (cache) {
    cache->inputs.resize(p.layers.size());
    cache->preactivations.resize(p.layers.size() - 1);
  }
  Eigen::MatrixXd a = input;
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    const auto& layer = p.layers[l];
    Eigen::MatrixXd z = layer.weight * a;
    z.colwise() += layer.bias;
    if (cache) cache->inputs[l] = std::move(a);
    if (l + 1 == p.layers.size()) return z;
    if (p.hidden.kind == ActivationKind::Sinusoidal) {
      a.resize(z.rows(), z.cols());
      detail::sin_array(z.data(), a.data(), static_cast<std::size_t>(z.size()));
    } else {
      const double slope = p.hidden.slope;
      a = z.unaryExpr([slope](double v) { return v > 0.0 ? v : slope * v; });
    }
    if (cache) cache->preactivations[l] = std::move(z);
  }
  return a;  // not reached
}

Eigen::VectorXd mlp_forward(const MlpParams& p, const Eigen::VectorXd& input) {
  return mlp_forward(p, Eigen::MatrixXd(input), nullptr).col(0);
}

Eigen::MatrixXd mlp_backward(const MlpParams& p, const MlpCache& cache, const Eigen::MatrixXd& grad_output,
                             MlpGrads& grads) {
  if (cache.inputs.size() != p.layers.size()) throw std::invalid_argument("mlp_backward: cache does not match network");
  grads.resize(p.layers.size());
  Eigen::MatrixXd delta = grad_output;
  for (std::size_t l = p.layers.size(); l-- > 0;) {
    if (l + 1 < p.layers.size()) {
      const auto& z = cache.preactivations[l];
      if (p.hidden.kind == ActivationKind::Sinusoidal) {
        Eigen::MatrixXd c(z.rows(), z.cols());
        detail::cos_array(z.data(), c.data(), static_cast<std::size_t>(z.size()));
        delta.array() *= c.array();
      } else {
        const double slope = p.hidden.slope;
        delta.array() *= z.unaryExpr([slope](double v) { return v > 0.0 ? 1.0 : slope; }).array();
      }
    }
    grads[l].weight.noalias() = delta * cache.inputs[l].transpose();
    grads[l].bias = delta.rowwise().sum();
    delta = p.layers[l].weight.transpose() * delta;
  }
  return delta;
}

}  // namespace ndpc
