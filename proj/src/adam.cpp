#include "ndpc/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace ndpc {

AdamState AdamState::for_params(const MlpParams& p, AdamHyper hyper) {
  AdamState s;
  s.first = zeros_like(p);
  s.second = zeros_like(p);
  s.hyper = hyper;
  return s;
}

void adam_step(MlpParams& params, const MlpGrads& grads, AdamState& state) {
  const std::size_t n = params.layers.size();
  if (grads.size() != n || state.first.size() != n || state.second.size() != n)
    throw std::invalid_argument("adam_step: layer count mismatch");
  auto same_shape = [](const DenseLayer& a, const DenseLayer& b) {
    return a.weight.rows() == b.weight.rows() && a.weight.cols() == b.weight.cols() && a.bias.size() == b.bias.size();
  };
  for (std::size_t l = 0; l < n; ++l) {
    const auto& p = params.layers[l];
    if (!same_shape(p, grads[l]) || !same_shape(p, state.first[l]) || !same_shape(p, state.second[l]))
      throw std::invalid_argument("adam_step: shape mismatch");
  }

  ++state.step;
  const auto& h = state.hyper;
  const double c1 = 1.0 - std::pow(h.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(h.beta2, static_cast<double>(state.step));
  const double step_size = h.lr / c1;
  const double sqrt_c2 = std::sqrt(c2);

  auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
    m = h.beta1 * m + (1.0 - h.beta1) * grad;
    v = h.beta2 * v + (1.0 - h.beta2) * grad.cwiseProduct(grad);
    param.array() -= step_size * m.array() / (v.array().sqrt() / sqrt_c2 + h.eps);
  };
  for (std::size_t l = 0; l < n; ++l) {
    update(params.layers[l].weight, grads[l].weight, state.first[l].weight, state.second[l].weight);
    update(params.layers[l].bias, grads[l].bias, state.first[l].bias, state.second[l].bias);
  }
}

}  // namespace ndpc
