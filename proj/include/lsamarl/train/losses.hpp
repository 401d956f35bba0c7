#pragma once

#include <span>

#include "lsamarl/tensor/graph.hpp"

// PPO objectives over a minibatch of B samples; every per-sample input is B long
// and recorded inputs are B x 1.
namespace lsamarl::train {

// mean_b min(rho*A, clip(rho, 1-eps, 1+eps)*A), rho = exp(new - old).
// This is the quantity to maximise.
Var policy_objective(Var new_log_probs, std::span<const double> old_log_probs, std::span<const double> advantages,
                     double eps);

// mean_b max((V - R)^2, (V_old + clip(V - V_old, -eps, eps) - R)^2).
Var critic_loss(Var values, std::span<const double> old_values, std::span<const double> returns, double eps);

// -n * (policy - beta1 * critic + beta2 * entropy): the minimised form of the
// per-agent objective summed over n agents sharing parameters.
Var total_loss(Var policy, Var critic, Var entropy, double beta1, double beta2, double n_agents);

// Share of samples with |rho - 1| > eps.
double clip_fraction(const Tensor& new_log_probs, std::span<const double> old_log_probs, double eps);

}  // namespace lsamarl::train
