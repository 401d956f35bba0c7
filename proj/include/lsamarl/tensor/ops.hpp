#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lsamarl/tensor/graph.hpp"

// Differentiable operations on rank-2 tensors. Every op records its backward
// rule on the graph that owns its inputs. Shape mismatches throw
// std::invalid_argument.
namespace lsamarl::ops {

Var matmul(Var a, Var b);

// Per-group products over consecutive row blocks of `block` rows each.
// block_matmul_nt: a,b are (G*block)xd, result is (G*block)xblock with
// group g equal to a_g * b_g^T. block_matmul: p is (G*block)xblock, v is
// (G*block)xd, group g of the result is p_g * v_g. With G = 1 these reduce to
// a*b^T and p*v.
Var block_matmul_nt(Var a, Var b, std::size_t block);
Var block_matmul(Var p, Var v, std::size_t block);

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var add_row(Var a, Var row);
Var scale(Var a, double s);
Var add_scalar(Var a, double s);

Var tanh_elem(Var a);
Var exp_elem(Var a);
Var square(Var a);

Var softmax_rows(Var a);
Var log_softmax_rows(Var a);

Var sum(Var a);
Var mean(Var a);
Var row_sum(Var a);

// Row-major reinterpretation; element order is unchanged.
Var reshape(Var a, std::size_t rows, std::size_t cols);
Var concat_cols(std::span<const Var> parts);
// out(i, 0) = a(i, cols[i]).
Var pick(Var a, std::span<const std::size_t> cols);

// Elementwise min/max. Ties route the gradient to the first argument.
Var minimum(Var a, Var b);
Var maximum(Var a, Var b);
// Elementwise clamp to [lo, hi]; the gradient is zero strictly outside.
Var clip(Var a, double lo, double hi);

// Plain (non-recorded) helpers shared with oracles and inference code.
Tensor softmax_rows_value(const Tensor& m);

}  // namespace lsamarl::ops
