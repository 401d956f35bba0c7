#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "lsamarl/tensor/graph.hpp"
#include "lsamarl/tensor/init.hpp"

namespace lsamarl::nets {

inline constexpr std::size_t kActionCount = 5;

/// Categorical distribution over the meta-actions: softmax of the actor's
/// tanh-bounded logits.
class ActionDistribution {
 public:
  explicit ActionDistribution(std::span<const double> logits);

  const std::array<double, kActionCount>& logits() const { return logits_; }
  const std::array<double, kActionCount>& probabilities() const { return probs_; }
  double probability(std::size_t action) const;
  double log_prob(std::size_t action) const;  // throws std::out_of_range
  double entropy() const;
  std::size_t argmax() const;  // lowest index among ties

 private:
  std::array<double, kActionCount> logits_{};
  std::array<double, kActionCount> log_probs_{};
  std::array<double, kActionCount> probs_{};
};

struct Sample {
  std::size_t action = 0;
  double log_prob = 0.0;
};

// Inverse-CDF draw using one uniform01 value.
Sample sample_action(const ActionDistribution& d, Rng& rng);

// Recorded counterparts on a B x 5 logits node.
Var log_prob_of(Var logits, std::span<const std::size_t> actions);  // B x 1
Var entropy_of(Var logits);                                         // B x 1

}  // namespace lsamarl::nets
