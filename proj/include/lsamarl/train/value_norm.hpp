#pragma once

#include <span>

namespace lsamarl::train {

/// Running, bias-corrected mean/variance of value targets. The critic learns
/// normalised values; rollouts and GAE work on the denormalised scale.
/// Disabled (or before the first update) it is the identity map.
class ValueNormalizer {
 public:
  explicit ValueNormalizer(bool enabled = true, double decay = 0.95) : enabled_(enabled), decay_(decay) {}

  void update(std::span<const double> targets);

  double mean() const;
  double stddev() const;
  double normalize(double v) const { return (v - mean()) / stddev(); }
  double denormalize(double v) const { return v * stddev() + mean(); }
  bool enabled() const { return enabled_; }

 private:
  bool enabled_;
  double decay_;
  double mean_ = 0.0;
  double mean_sq_ = 0.0;
  double weight_ = 0.0;  // debiasing term, 1 - decay^updates
};

}  // namespace lsamarl::train
