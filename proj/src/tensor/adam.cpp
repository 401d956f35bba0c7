#include "lsamarl/tensor/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace lsamarl {

AdamState::AdamState(const ParamSet& params, AdamConfig cfg) : config(cfg) {
  first_moment.reserve(params.size());
  second_moment.reserve(params.size());
  for (ParamId id = 0; id < params.size(); ++id) {
    first_moment.emplace_back(params.value(id).shape(), 0.0);
    second_moment.emplace_back(params.value(id).shape(), 0.0);
  }
}

void adam_step(ParamSet& params, const GradientMap& grads, AdamState& state) {
  if (state.first_moment.size() != params.size()) {
    throw std::invalid_argument("optimizer state does not match parameter set");
  }
  for (ParamId id = 0; id < params.size(); ++id) {
    auto it = grads.find(id);
    if (it == grads.end()) throw std::invalid_argument("missing gradient for parameter " + params.name(id));
    if (!it->second.same_shape(params.value(id)) || !state.first_moment[id].same_shape(params.value(id))) {
      throw std::invalid_argument("gradient shape mismatch for parameter " + params.name(id));
    }
  }

  ++state.step;
  const auto& c = state.config;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);
  for (ParamId id = 0; id < params.size(); ++id) {
    auto p = params.value(id).data();
    auto g = grads.at(id).data();
    auto m = state.first_moment[id].data();
    auto v = state.second_moment[id].data();
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      p[i] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
    }
  }
}

double global_grad_norm(const GradientMap& grads) {
  double sq = 0.0;
  for (const auto& [id, g] : grads) {
    for (double x : g.data()) sq += x * x;
  }
  return std::sqrt(sq);
}

double clip_grad_norm(GradientMap& grads, double max_norm) {
  const double norm = global_grad_norm(grads);
  if (norm > max_norm && norm > 0.0) {
    const double s = max_norm / norm;
    for (auto& [id, g] : grads) {
      for (auto& x : g.data()) x *= s;
    }
  }
  return norm;
}

}  // namespace lsamarl
