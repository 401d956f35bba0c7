#pragma once

#include <cstdint>
#include <vector>

#include "lsamarl/tensor/graph.hpp"

namespace lsamarl {

struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  friend bool operator==(const AdamConfig&, const AdamConfig&) = default;
};

/// First/second moment accumulators, one pair per parameter of a ParamSet.
struct AdamState {
  AdamConfig config;
  std::uint64_t step = 0;
  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;

  AdamState() = default;
  AdamState(const ParamSet& params, AdamConfig cfg);

  friend bool operator==(const AdamState&, const AdamState&) = default;
};

// Bias-corrected adaptive-moment update. Throws std::invalid_argument if
// `grads` lacks a parameter or a gradient shape disagrees with its parameter.
void adam_step(ParamSet& params, const GradientMap& grads, AdamState& state);

double global_grad_norm(const GradientMap& grads);

// Rescales all gradients so their joint L2 norm is at most max_norm.
// Returns the norm before clipping.
double clip_grad_norm(GradientMap& grads, double max_norm);

}  // namespace lsamarl
