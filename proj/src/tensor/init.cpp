#include "lsamarl/tensor/init.hpp"

#include <cmath>
#include <vector>

namespace lsamarl {

Rng make_rng(std::initializer_list<std::uint64_t> keys) {
  std::vector<std::uint32_t> words;
  for (auto k : keys) {
    words.push_back(static_cast<std::uint32_t>(k & 0xFFFFFFFFu));
    words.push_back(static_cast<std::uint32_t>(k >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Tensor uniform(std::size_t rows, std::size_t cols, double lo, double hi, Rng& rng) {
  Tensor t = Tensor::zeros(rows, cols);
  for (auto& x : t.data()) x = lo + (hi - lo) * uniform01(rng);
  return t;
}

Tensor fan_in_uniform(std::size_t rows, std::size_t cols, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(rows));
  return uniform(rows, cols, -bound, bound, rng);
}

}  // namespace lsamarl
