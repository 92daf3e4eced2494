#pragma once

#include <cstdint>

#include "ndpc/mlp.hpp"

namespace ndpc {

struct AdamHyper {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Moment accumulators for one network.
struct AdamState {
  MlpGrads first;
  MlpGrads second;
  std::int64_t step = 0;
  AdamHyper hyper;

  static AdamState for_params(const MlpParams& p, AdamHyper hyper = {});
};

/// One bias-corrected Adam update of `params` in place.
void adam_step(MlpParams& params, const MlpGrads& grads, AdamState& state);

}  // namespace ndpc
