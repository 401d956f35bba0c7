#include "lsamarl/train/value_norm.hpp"

#include <algorithm>
#include <cmath>

namespace lsamarl::train {

void ValueNormalizer::update(std::span<const double> targets) {
  if (!enabled_ || targets.empty()) return;
  double m = 0.0, sq = 0.0;
  for (double t : targets) {
    m += t;
    sq += t * t;
  }
  m /= static_cast<double>(targets.size());
  sq /= static_cast<double>(targets.size());
  mean_ = decay_ * mean_ + (1.0 - decay_) * m;
  mean_sq_ = decay_ * mean_sq_ + (1.0 - decay_) * sq;
  weight_ = decay_ * weight_ + (1.0 - decay_);
}

double ValueNormalizer::mean() const { return weight_ > 0.0 ? mean_ / weight_ : 0.0; }

double ValueNormalizer::stddev() const {
  if (weight_ <= 0.0) return 1.0;
  const double m = mean();
  return std::sqrt(std::max(mean_sq_ / weight_ - m * m, 1e-4));
}

}  // namespace lsamarl::train
