#pragma once

#include <cstdint>
#include <random>

#include "lsamarl/tensor/tensor.hpp"

namespace lsamarl {

using Rng = std::mt19937_64;

// Generator seeded from an ordered list of integers (seed, stream index, ...).
Rng make_rng(std::initializer_list<std::uint64_t> keys);

// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] with fan_in = rows.
Tensor fan_in_uniform(std::size_t rows, std::size_t cols, Rng& rng);
Tensor uniform(std::size_t rows, std::size_t cols, double lo, double hi, Rng& rng);

// Uniform double in [0, 1) from 53 random bits; identical on every platform.
double uniform01(Rng& rng);

}  // namespace lsamarl
