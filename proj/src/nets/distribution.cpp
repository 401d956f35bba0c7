#include "lsamarl/nets/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lsamarl/tensor/ops.hpp"

namespace lsamarl::nets {

ActionDistribution::ActionDistribution(std::span<const double> logits) {
  if (logits.size() != kActionCount) {
    throw std::invalid_argument("expected " + std::to_string(kActionCount) + " logits, got " +
                                std::to_string(logits.size()));
  }
  std::copy(logits.begin(), logits.end(), logits_.begin());
  const double top = *std::max_element(logits_.begin(), logits_.end());
  double z = 0.0;
  for (double l : logits_) z += std::exp(l - top);
  const double log_z = top + std::log(z);
  for (std::size_t a = 0; a < kActionCount; ++a) {
    log_probs_[a] = logits_[a] - log_z;
    probs_[a] = std::exp(log_probs_[a]);
  }
}

double ActionDistribution::probability(std::size_t action) const { return probs_.at(action); }

double ActionDistribution::log_prob(std::size_t action) const {
  if (action >= kActionCount) throw std::out_of_range("action id " + std::to_string(action) + " out of range");
  return log_probs_[action];
}

double ActionDistribution::entropy() const {
  double h = 0.0;
  for (std::size_t a = 0; a < kActionCount; ++a) h -= probs_[a] * log_probs_[a];
  return h;
}

std::size_t ActionDistribution::argmax() const {
  return static_cast<std::size_t>(std::max_element(logits_.begin(), logits_.end()) - logits_.begin());
}

Sample sample_action(const ActionDistribution& d, Rng& rng) {
  const double u = uniform01(rng);
  double cdf = 0.0;
  std::size_t chosen = kActionCount - 1;
  for (std::size_t a = 0; a < kActionCount; ++a) {
    cdf += d.probabilities()[a];
    if (u < cdf) {
      chosen = a;
      break;
    }
  }
  return {chosen, d.log_prob(chosen)};
}

Var log_prob_of(Var logits, std::span<const std::size_t> actions) {
  for (auto a : actions) {
    if (a >= kActionCount) throw std::out_of_range("action id " + std::to_string(a) + " out of range");
  }
  return ops::pick(ops::log_softmax_rows(logits), actions);
}

Var entropy_of(Var logits) {
  Var log_p = ops::log_softmax_rows(logits);
  return ops::scale(ops::row_sum(ops::mul(ops::exp_elem(log_p), log_p)), -1.0);
}

}  // namespace lsamarl::nets
