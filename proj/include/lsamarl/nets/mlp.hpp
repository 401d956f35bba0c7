#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lsamarl/tensor/graph.hpp"
#include "lsamarl/tensor/init.hpp"

namespace lsamarl::nets {

/// Fully connected stack x*W1+b1 -> tanh -> ... -> x*WL+bL. The hidden layers
/// always use tanh; the output layer optionally. Parameters are named
/// "<prefix>l{k}.W" (in x out) and "<prefix>l{k}.b" (1 x out).
class Mlp {
 public:
  Mlp() = default;
  Mlp(ParamSet& params, const std::string& prefix, std::vector<std::size_t> sizes, bool tanh_output, Rng& rng);
  static Mlp bind(const ParamSet& params, const std::string& prefix, std::vector<std::size_t> sizes,
                  bool tanh_output);

  // x is B x in; result B x out.
  Var forward(Graph& g, const ParamSet& params, Var x) const;

  std::size_t input_size() const { return sizes_.front(); }
  std::size_t output_size() const { return sizes_.back(); }
  const std::vector<ParamId>& weights() const { return weights_; }
  const std::vector<ParamId>& biases() const { return biases_; }

 private:
  std::vector<std::size_t> sizes_;
  bool tanh_output_ = false;
  std::vector<ParamId> weights_;
  std::vector<ParamId> biases_;
};

}  // namespace lsamarl::nets
