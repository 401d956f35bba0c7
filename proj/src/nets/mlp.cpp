#include "lsamarl/nets/mlp.hpp"

#include <stdexcept>

#include "lsamarl/tensor/ops.hpp"

namespace lsamarl::nets {

namespace {

std::string layer_name(const std::string& prefix, std::size_t k, const char* what) {
  return prefix + "l" + std::to_string(k + 1) + "." + what;
}

void check_sizes(const std::vector<std::size_t>& sizes) {
  if (sizes.size() < 2) throw std::invalid_argument("an MLP needs at least an input and an output size");
  for (auto s : sizes) {
    if (s == 0) throw std::invalid_argument("MLP layer sizes must be positive");
  }
}

}  // namespace

Mlp::Mlp(ParamSet& params, const std::string& prefix, std::vector<std::size_t> sizes, bool tanh_output, Rng& rng)
    : sizes_(std::move(sizes)), tanh_output_(tanh_output) {
  check_sizes(sizes_);
  for (std::size_t k = 0; k + 1 < sizes_.size(); ++k) {
    weights_.push_back(params.add(layer_name(prefix, k, "W"), fan_in_uniform(sizes_[k], sizes_[k + 1], rng)));
    biases_.push_back(params.add(layer_name(prefix, k, "b"), Tensor::zeros(1, sizes_[k + 1])));
  }
}

Mlp Mlp::bind(const ParamSet& params, const std::string& prefix, std::vector<std::size_t> sizes, bool tanh_output) {
  check_sizes(sizes);
  Mlp m;
  m.sizes_ = std::move(sizes);
  m.tanh_output_ = tanh_output;
  for (std::size_t k = 0; k + 1 < m.sizes_.size(); ++k) {
    m.weights_.push_back(params.require(layer_name(prefix, k, "W")));
    m.biases_.push_back(params.require(layer_name(prefix, k, "b")));
    const auto& w = params.value(m.weights_.back());
    if (w.rows() != m.sizes_[k] || w.cols() != m.sizes_[k + 1]) {
      throw std::invalid_argument(params.name(m.weights_.back()) + " has shape " + shape_string(w.shape()));
    }
  }
  return m;
}

Var Mlp::forward(Graph& g, const ParamSet& params, Var x) const {
  if (x.cols() != input_size()) {
    throw std::invalid_argument("MLP input has " + std::to_string(x.cols()) + " columns, expected " +
                                std::to_string(input_size()));
  }
  Var h = x;
  const std::size_t layers = weights_.size();
  for (std::size_t k = 0; k < layers; ++k) {
    h = ops::add_row(ops::matmul(h, g.param(params, weights_[k])), g.param(params, biases_[k]));
    if (k + 1 < layers || tanh_output_) h = ops::tanh_elem(h);
  }
  return h;
}

}  // namespace lsamarl::nets
