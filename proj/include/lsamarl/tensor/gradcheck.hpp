#pragma once

#include <functional>
#include <span>
#include <vector>

#include "lsamarl/tensor/graph.hpp"

namespace lsamarl {

// Builds a scalar loss from leaf variables (one per input tensor).
using LossBuilder = std::function<Var(Graph&, std::span<const Var>)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::size_t coordinates = 0;
};

/// Compares reverse-mode gradients of `loss` at `point` with central
/// differences (f(x+h) - f(x-h)) / 2h, coordinate by coordinate.
/// Relative error is |auto - numeric| / max(|auto|, |numeric|, scale_floor).
GradCheckResult finite_diff_check(const LossBuilder& loss, std::vector<Tensor> point, double h,
                                  double scale_floor = 1e-3);

// Same, but differentiates with respect to the tensors of a ParamSet.
GradCheckResult finite_diff_check(const std::function<Var(Graph&, const ParamSet&)>& loss, ParamSet params,
                                  double h, double scale_floor = 1e-3);

}  // namespace lsamarl
