#include "lsamarl/lsa/encoder.hpp"

#include <cmath>
#include <stdexcept>

#include "lsamarl/tensor/ops.hpp"

namespace lsamarl::lsa {

namespace {

std::string block_name(const std::string& prefix, std::size_t m) { return prefix + "block" + std::to_string(m + 1); }

std::string head_name(const std::string& prefix, std::size_t m, std::size_t i, const char* w) {
  return block_name(prefix, m) + ".head" + std::to_string(i + 1) + "." + w;
}

void check_input(const LsaDims& d, const Tensor& o) {
  if (o.rank() != 2 || o.cols() != d.n_features || o.rows() == 0 || o.rows() % d.n_obs != 0) {
    throw std::invalid_argument("LSA input " + shape_string(o.shape()) + " is not a stack of " +
                                std::to_string(d.n_obs) + "x" + std::to_string(d.n_features) + " observations");
  }
}

}  // namespace

void LsaDims::validate() const {
  if (n_obs == 0 || n_features == 0 || heads == 0 || blocks == 0) {
    throw std::invalid_argument("LSA dimensions must be positive");
  }
  if (n_features % heads != 0) {
    throw std::invalid_argument("head count " + std::to_string(heads) + " does not divide feature count " +
                                std::to_string(n_features));
  }
}

LsaDims LsaDims::for_observation(std::size_t n_obs, std::size_t n_features) {
  LsaDims d{n_obs, n_features, n_features / 2, 1};
  d.validate();
  return d;
}

Var attention(Var q, Var k, Var v, std::size_t block) {
  if (q.cols() != k.cols() || q.rows() != k.rows() || v.rows() != q.rows()) {
    throw std::invalid_argument("attention: q, k, v shapes disagree");
  }
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(q.cols()));
  Var logits = ops::scale(ops::block_matmul_nt(q, k, block), inv_sqrt_d);
  return ops::block_matmul(ops::softmax_rows(logits), v, block);
}

LsaEncoder::LsaEncoder(ParamSet& params, const std::string& prefix, LsaDims dims, Rng& rng) : dims_(dims) {
  dims_.validate();
  const std::size_t x = dims_.n_features, dh = dims_.head_dim(), k = dims_.flat_size();
  for (std::size_t m = 0; m < dims_.blocks; ++m) {
    BlockParams b;
    for (std::size_t i = 0; i < dims_.heads; ++i) {
      b.wq.push_back(params.add(head_name(prefix, m, i, "WQ"), fan_in_uniform(x, dh, rng)));
      b.wk.push_back(params.add(head_name(prefix, m, i, "WK"), fan_in_uniform(x, dh, rng)));
      b.wv.push_back(params.add(head_name(prefix, m, i, "WV"), fan_in_uniform(x, dh, rng)));
    }
    b.wo = params.add(block_name(prefix, m) + ".WO", fan_in_uniform(x, x, rng));
    b.wff = params.add(block_name(prefix, m) + ".WFF", fan_in_uniform(k, k, rng));
    blocks_.push_back(std::move(b));
  }
}

LsaEncoder LsaEncoder::bind(const ParamSet& params, const std::string& prefix, LsaDims dims) {
  dims.validate();
  LsaEncoder enc;
  enc.dims_ = dims;
  for (std::size_t m = 0; m < dims.blocks; ++m) {
    BlockParams b;
    for (std::size_t i = 0; i < dims.heads; ++i) {
      b.wq.push_back(params.require(head_name(prefix, m, i, "WQ")));
      b.wk.push_back(params.require(head_name(prefix, m, i, "WK")));
      b.wv.push_back(params.require(head_name(prefix, m, i, "WV")));
    }
    b.wo = params.require(block_name(prefix, m) + ".WO");
    b.wff = params.require(block_name(prefix, m) + ".WFF");
    enc.blocks_.push_back(std::move(b));
  }
  return enc;
}

Var LsaEncoder::multi_head(Graph& g, const ParamSet& params, Var o, std::size_t block) const {
  check_input(dims_, o.value());
  const auto& b = blocks_.at(block);
  std::vector<Var> heads;
  heads.reserve(dims_.heads);
  for (std::size_t i = 0; i < dims_.heads; ++i) {
    Var q = ops::matmul(o, g.param(params, b.wq[i]));
    Var k = ops::matmul(o, g.param(params, b.wk[i]));
    Var v = ops::matmul(o, g.param(params, b.wv[i]));
    heads.push_back(attention(q, k, v, dims_.n_obs));
  }
  Var cat = heads.size() == 1 ? heads[0] : ops::concat_cols(heads);
  return ops::matmul(cat, g.param(params, b.wo));
}

Var LsaEncoder::feed_forward(Graph& g, const ParamSet& params, Var y, std::size_t block) const {
  check_input(dims_, y.value());
  const std::size_t batch = y.rows() / dims_.n_obs;
  Var flat = ops::reshape(y, batch, dims_.flat_size());
  Var mixed = ops::matmul(flat, g.param(params, blocks_.at(block).wff));
  return ops::reshape(mixed, y.rows(), dims_.n_features);
}

Var LsaEncoder::encode(Graph& g, const ParamSet& params, Var o) const {
  check_input(dims_, o.value());
  Var h = o;
  for (std::size_t m = 0; m < dims_.blocks; ++m) h = feed_forward(g, params, multi_head(g, params, h, m), m);
  return ops::reshape(h, o.rows() / dims_.n_obs, dims_.flat_size());
}

Tensor LsaEncoder::attention_weights(const ParamSet& params, const Tensor& o, std::size_t block,
                                     std::size_t head) const {
  if (o.rank() != 2 || o.rows() != dims_.n_obs || o.cols() != dims_.n_features) {
    throw std::invalid_argument("attention_weights expects a single observation");
  }
  Graph g;
  const auto& b = blocks_.at(block);
  Var in = g.constant(o);
  Var q = ops::matmul(in, g.param(params, b.wq.at(head)));
  Var k = ops::matmul(in, g.param(params, b.wk.at(head)));
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(dims_.head_dim()));
  return ops::softmax_rows(ops::scale(ops::block_matmul_nt(q, k, dims_.n_obs), inv_sqrt_d)).value();
}

}  // namespace lsamarl::lsa
