#include "lsamarl/train/losses.hpp"

#include <cmath>
#include <stdexcept>

#include "lsamarl/tensor/ops.hpp"

namespace lsamarl::train {

namespace {

Tensor column_of(std::span<const double> v) { return Tensor::column(v); }

void check_batch(Var x, std::size_t n, const char* what) {
  if (x.cols() != 1 || x.rows() != n) throw std::invalid_argument(std::string(what) + ": batch size mismatch");
}

}  // namespace

Var policy_objective(Var new_log_probs, std::span<const double> old_log_probs, std::span<const double> advantages,
                     double eps) {
  check_batch(new_log_probs, old_log_probs.size(), "policy_objective");
  check_batch(new_log_probs, advantages.size(), "policy_objective");
  Graph& g = new_log_probs.graph();
  Var adv = g.constant(column_of(advantages));
  Var ratio = ops::exp_elem(ops::sub(new_log_probs, g.constant(column_of(old_log_probs))));
  Var unclipped = ops::mul(ratio, adv);
  Var clipped = ops::mul(ops::clip(ratio, 1.0 - eps, 1.0 + eps), adv);
  return ops::mean(ops::minimum(unclipped, clipped));
}

Var critic_loss(Var values, std::span<const double> old_values, std::span<const double> returns, double eps) {
  check_batch(values, old_values.size(), "critic_loss");
  check_batch(values, returns.size(), "critic_loss");
  Graph& g = values.graph();
  Var old_v = g.constant(column_of(old_values));
  Var target = g.constant(column_of(returns));
  Var unclipped = ops::square(ops::sub(values, target));
  Var clipped_v = ops::add(old_v, ops::clip(ops::sub(values, old_v), -eps, eps));
  Var clipped = ops::square(ops::sub(clipped_v, target));
  return ops::mean(ops::maximum(unclipped, clipped));
}

Var total_loss(Var policy, Var critic, Var entropy, double beta1, double beta2, double n_agents) {
  Var objective = ops::sub(policy, ops::scale(critic, beta1));
  if (beta2 != 0.0) objective = ops::add(objective, ops::scale(entropy, beta2));
  return ops::scale(objective, -n_agents);
}

double clip_fraction(const Tensor& new_log_probs, std::span<const double> old_log_probs, double eps) {
  if (old_log_probs.empty()) return 0.0;
  std::size_t clipped = 0;
  for (std::size_t i = 0; i < old_log_probs.size(); ++i) {
    if (std::abs(std::exp(new_log_probs[i] - old_log_probs[i]) - 1.0) > eps) ++clipped;
  }
  return static_cast<double>(clipped) / static_cast<double>(old_log_probs.size());
}

}  // namespace lsamarl::train
