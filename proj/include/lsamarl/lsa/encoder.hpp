#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lsamarl/tensor/graph.hpp"
#include "lsamarl/tensor/init.hpp"

namespace lsamarl::lsa {

struct LsaDims {
  std::size_t n_obs = 4;       // N, rows per observation
  std::size_t n_features = 6;  // X
  std::size_t heads = 3;       // h
  std::size_t blocks = 1;      // M

  std::size_t head_dim() const { return n_features / heads; }
  std::size_t flat_size() const { return n_obs * n_features; }  // K
  // Throws std::invalid_argument when h does not divide X or a size is zero.
  void validate() const;

  // h = X / 2, M = 1.
  static LsaDims for_observation(std::size_t n_obs, std::size_t n_features);
};

// softmax_rows(q k^T / sqrt(d)) v, evaluated independently on each group of
// `block` consecutive rows. q, k, v are (G*block) x d.
Var attention(Var q, Var k, Var v, std::size_t block);

// Parameter ids of one attention block.
struct BlockParams {
  std::vector<ParamId> wq, wk, wv;  // one per head, X x X/h
  ParamId wo = 0;                   // X x X
  ParamId wff = 0;                  // K x K
};

/// Local State Attention encoder. Parameters live in a caller-owned ParamSet
/// under "<prefix>block{m}.head{i}.{WQ|WK|WV}", "<prefix>block{m}.WO" and
/// "<prefix>block{m}.WFF" with 1-based m and i.
class LsaEncoder {
 public:
  LsaEncoder() = default;
  // Registers freshly initialised parameters in `params`.
  LsaEncoder(ParamSet& params, const std::string& prefix, LsaDims dims, Rng& rng);
  // Binds to parameters that already exist in `params`.
  static LsaEncoder bind(const ParamSet& params, const std::string& prefix, LsaDims dims);

  const LsaDims& dims() const { return dims_; }
  const std::vector<BlockParams>& blocks() const { return blocks_; }

  // o is (B*N) x X, a stack of B observations. Result has the same shape.
  Var multi_head(Graph& g, const ParamSet& params, Var o, std::size_t block = 0) const;
  // Row-major flatten of each observation, times W^FF, reshaped back.
  Var feed_forward(Graph& g, const ParamSet& params, Var y, std::size_t block = 0) const;
  // B x K encodings of a (B*N) x X stack.
  Var encode(Graph& g, const ParamSet& params, Var o) const;

  // Attention weights (N x N) of one head for a single observation.
  Tensor attention_weights(const ParamSet& params, const Tensor& o, std::size_t block, std::size_t head) const;

 private:
  LsaDims dims_;
  std::vector<BlockParams> blocks_;
};

}  // namespace lsamarl::lsa
