#include "lsamarl/train/gae.hpp"

#include <stdexcept>
#include <string>

namespace lsamarl::train {

AdvantageBuffer compute_gae(std::span<const double> rewards, std::span<const double> values,
                            std::span<const double> dones, double bootstrap, double gamma, double lambda) {
  const std::size_t n = rewards.size();
  if (values.size() != n || dones.size() != n) throw std::invalid_argument("compute_gae: length mismatch");
  AdvantageBuffer out;
  out.deltas.resize(n);
  out.advantages.resize(n);
  out.returns.resize(n);
  double next_adv = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    const double next_value = k + 1 < n ? values[k + 1] : bootstrap;
    const double keep = 1.0 - dones[k];
    out.deltas[k] = rewards[k] + gamma * next_value * keep - values[k];
    next_adv = out.deltas[k] + gamma * lambda * keep * next_adv;
    out.advantages[k] = next_adv;
    out.returns[k] = out.advantages[k] + values[k];
  }
  return out;
}

std::size_t verify_return_identity(const AdvantageBuffer& buf, std::span<const double> values) {
  if (buf.returns.size() != values.size() || buf.advantages.size() != values.size()) {
    throw std::logic_error("return identity: buffer and values differ in length");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (buf.returns[i] - (buf.advantages[i] + values[i]) != 0.0) {
      throw std::logic_error("return identity violated at sample " + std::to_string(i));
    }
  }
  return values.size();
}

}  // namespace lsamarl::train
