#include "lsamarl/tensor/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lsamarl::ops {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapC = Eigen::Map<const RowMatrix>;
using Map = Eigen::Map<RowMatrix>;

MapC view(const Tensor& t) { return MapC(t.data().data(), t.rows(), t.cols()); }
Map view(Tensor& t) { return Map(t.data().data(), t.rows(), t.cols()); }

MapC block_view(const Tensor& t, std::size_t g, std::size_t block) {
  return MapC(t.data().data() + g * block * t.cols(), block, t.cols());
}
Map block_view(Tensor& t, std::size_t g, std::size_t block) {
  return Map(t.data().data() + g * block * t.cols(), block, t.cols());
}

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
  throw std::invalid_argument(std::string(op) + ": incompatible shapes " +
                              shape_string(a.shape()) + " and " + shape_string(b.shape()));
}

void require_rank2(const char* op, const Tensor& t) {
  if (t.rank() != 2) {
    throw std::invalid_argument(std::string(op) + ": expected a matrix, got " + shape_string(t.shape()));
  }
}

void require_same_graph(Var a, Var b) {
  if (&a.graph() != &b.graph()) throw std::invalid_argument("operands belong to different graphs");
}

template <typename F>
Var unary(Var a, Tensor out, F&& local_grad) {
  // local_grad(x, y) -> dy/dx elementwise
  return a.graph().record(std::move(out), {a.id()},
                          [ia = a.id(), lg = std::forward<F>(local_grad)](Graph& g, NodeId self) {
                            if (!g.requires_grad(ia)) return;
                            const Tensor& x = g.value(ia);
                            const Tensor& y = g.value(self);
                            const Tensor& dy = g.grad(self);
                            Tensor& dx = g.grad_buffer(ia);
                            for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dy[i] * lg(x[i], y[i]);
                          });
}

void accumulate(Tensor& dst, const Tensor& src, double s = 1.0) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += s * src[i];
}

}  // namespace

Var matmul(Var a, Var b) {
  require_same_graph(a, b);
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  require_rank2("matmul", A);
  require_rank2("matmul", B);
  if (A.cols() != B.rows()) shape_error("matmul", A, B);
  Tensor C = Tensor::zeros(A.rows(), B.cols());
  view(C).noalias() = view(A) * view(B);
  return a.graph().record(std::move(C), {a.id(), b.id()},
                          [ia = a.id(), ib = b.id()](Graph& g, NodeId self) {
                            const Tensor& dC = g.grad(self);
                            if (g.requires_grad(ia)) {
                              view(g.grad_buffer(ia)).noalias() += view(dC) * view(g.value(ib)).transpose();
                            }
                            if (g.requires_grad(ib)) {
                              view(g.grad_buffer(ib)).noalias() += view(g.value(ia)).transpose() * view(dC);
                            }
                          });
}

Var block_matmul_nt(Var a, Var b, std::size_t block) {
  require_same_graph(a, b);
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  require_rank2("block_matmul_nt", A);
  require_rank2("block_matmul_nt", B);
  if (!A.same_shape(B) || block == 0 || A.rows() % block != 0) shape_error("block_matmul_nt", A, B);
  const std::size_t groups = A.rows() / block;
  Tensor C = Tensor::zeros(A.rows(), block);
  for (std::size_t g = 0; g < groups; ++g) {
    block_view(C, g, block).noalias() = block_view(A, g, block) * block_view(B, g, block).transpose();
  }
  return a.graph().record(
      std::move(C), {a.id(), b.id()}, [ia = a.id(), ib = b.id(), block, groups](Graph& gr, NodeId self) {
        const Tensor& dC = gr.grad(self);
        if (gr.requires_grad(ia)) {
          Tensor& dA = gr.grad_buffer(ia);
          const Tensor& Bv = gr.value(ib);
          for (std::size_t g = 0; g < groups; ++g) {
            block_view(dA, g, block).noalias() += block_view(dC, g, block) * block_view(Bv, g, block);
          }
        }
        if (gr.requires_grad(ib)) {
          Tensor& dB = gr.grad_buffer(ib);
          const Tensor& Av = gr.value(ia);
          for (std::size_t g = 0; g < groups; ++g) {
            block_view(dB, g, block).noalias() +=
                block_view(dC, g, block).transpose() * block_view(Av, g, block);
          }
        }
      });
}

Var block_matmul(Var p, Var v, std::size_t block) {
  require_same_graph(p, v);
  const Tensor& P = p.value();
  const Tensor& V = v.value();
  require_rank2("block_matmul", P);
  require_rank2("block_matmul", V);
  if (block == 0 || P.cols() != block || P.rows() != V.rows() || P.rows() % block != 0) {
    shape_error("block_matmul", P, V);
  }
  const std::size_t groups = P.rows() / block;
  Tensor C = Tensor::zeros(P.rows(), V.cols());
  for (std::size_t g = 0; g < groups; ++g) {
    block_view(C, g, block).noalias() = block_view(P, g, block) * block_view(V, g, block);
  }
  return p.graph().record(
      std::move(C), {p.id(), v.id()}, [ip = p.id(), iv = v.id(), block, groups](Graph& gr, NodeId self) {
        const Tensor& dC = gr.grad(self);
        if (gr.requires_grad(ip)) {
          Tensor& dP = gr.grad_buffer(ip);
          const Tensor& Vv = gr.value(iv);
          for (std::size_t g = 0; g < groups; ++g) {
            block_view(dP, g, block).noalias() +=
                block_view(dC, g, block) * block_view(Vv, g, block).transpose();
          }
        }
        if (gr.requires_grad(iv)) {
          Tensor& dV = gr.grad_buffer(iv);
          const Tensor& Pv = gr.value(ip);
          for (std::size_t g = 0; g < groups; ++g) {
            block_view(dV, g, block).noalias() +=
                block_view(Pv, g, block).transpose() * block_view(dC, g, block);
          }
        }
      });
}

Var add(Var a, Var b) {
  require_same_graph(a, b);
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  if (!A.same_shape(B)) shape_error("add", A, B);
  Tensor C = A;
  accumulate(C, B);
  return a.graph().record(std::move(C), {a.id(), b.id()}, [ia = a.id(), ib = b.id()](Graph& g, NodeId self) {
    if (g.requires_grad(ia)) accumulate(g.grad_buffer(ia), g.grad(self));
    if (g.requires_grad(ib)) accumulate(g.grad_buffer(ib), g.grad(self));
  });
}

Var sub(Var a, Var b) {
  require_same_graph(a, b);
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  if (!A.same_shape(B)) shape_error("sub", A, B);
  Tensor C = A;
  accumulate(C, B, -1.0);
  return a.graph().record(std::move(C), {a.id(), b.id()}, [ia = a.id(), ib = b.id()](Graph& g, NodeId self) {
    if (g.requires_grad(ia)) accumulate(g.grad_buffer(ia), g.grad(self));
    if (g.requires_grad(ib)) accumulate(g.grad_buffer(ib), g.grad(self), -1.0);
  });
}

Var mul(Var a, Var b) {
  require_same_graph(a, b);
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  if (!A.same_shape(B)) shape_error("mul", A, B);
  Tensor C = A;
  for (std::size_t i = 0; i < C.size(); ++i) C[i] *= B[i];
  return a.graph().record(std::move(C), {a.id(), b.id()}, [ia = a.id(), ib = b.id()](Graph& g, NodeId self) {
    const Tensor& dC = g.grad(self);
    if (g.requires_grad(ia)) {
      Tensor& dA = g.grad_buffer(ia);
      const Tensor& Bv = g.value(ib);
      for (std::size_t i = 0; i < dA.size(); ++i) dA[i] += dC[i] * Bv[i];
    }
    if (g.requires_grad(ib)) {
      Tensor& dB = g.grad_buffer(ib);
      const Tensor& Av = g.value(ia);
      for (std::size_t i = 0; i < dB.size(); ++i) dB[i] += dC[i] * Av[i];
    }
  });
}

Var add_row(Var a, Var row) {
  require_same_graph(a, row);
  const Tensor& A = a.value();
  const Tensor& R = row.value();
  require_rank2("add_row", A);
  require_rank2("add_row", R);
  if (R.rows() != 1 || R.cols() != A.cols()) shape_error("add_row", A, R);
  Tensor C = A;
  view(C).rowwise() += view(R).row(0);
  return a.graph().record(std::move(C), {a.id(), row.id()}, [ia = a.id(), ir = row.id()](Graph& g, NodeId self) {
    const Tensor& dC = g.grad(self);
    if (g.requires_grad(ia)) accumulate(g.grad_buffer(ia), dC);
    if (g.requires_grad(ir)) view(g.grad_buffer(ir)).row(0) += view(dC).colwise().sum();
  });
}

Var scale(Var a, double s) {
  Tensor C = a.value();
  for (auto& x : C.data()) x *= s;
  return a.graph().record(std::move(C), {a.id()}, [ia = a.id(), s](Graph& g, NodeId self) {
    if (g.requires_grad(ia)) accumulate(g.grad_buffer(ia), g.grad(self), s);
  });
}

Var add_scalar(Var a, double s) {
  Tensor C = a.value();
  for (auto& x : C.data()) x += s;
  return a.graph().record(std::move(C), {a.id()}, [ia = a.id()](Graph& g, NodeId self) {
    if (g.requires_grad(ia)) accumulate(g.grad_buffer(ia), g.grad(self));
  });
}

Var tanh_elem(Var a) {
  Tensor y = a.value();
  for (auto& x : y.data()) x = std::tanh(x);
  return unary(a, std::move(y), [](double, double yv) { return 1.0 - yv * yv; });
}

Var exp_elem(Var a) {
  Tensor y = a.value();
  for (auto& x : y.data()) x = std::exp(x);
  return unary(a, std::move(y), [](double, double yv) { return yv; });
}

Var square(Var a) {
  Tensor y = a.value();
  for (auto& x : y.data()) x = x * x;
  return unary(a, std::move(y), [](double xv, double) { return 2.0 * xv; });
}

Tensor softmax_rows_value(const Tensor& m) {
  require_rank2("softmax_rows", m);
  Tensor y = m;
  const std::size_t r = m.rows(), c = m.cols();
  double* d = y.data().data();
  for (std::size_t i = 0; i < r; ++i) {
    double* row = d + i * c;
    const double mx = *std::max_element(row, row + c);
    double total = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      row[j] = std::exp(row[j] - mx);
      total += row[j];
    }
    for (std::size_t j = 0; j < c; ++j) row[j] /= total;
  }
  return y;
}

Var softmax_rows(Var a) {
  Tensor y = softmax_rows_value(a.value());
  return a.graph().record(std::move(y), {a.id()}, [ia = a.id()](Graph& g, NodeId self) {
    if (!g.requires_grad(ia)) return;
    const Tensor& Y = g.value(self);
    const Tensor& dY = g.grad(self);
    Tensor& dX = g.grad_buffer(ia);
    const std::size_t r = Y.rows(), c = Y.cols();
    for (std::size_t i = 0; i < r; ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < c; ++j) dot += dY[i * c + j] * Y[i * c + j];
      for (std::size_t j = 0; j < c; ++j) dX[i * c + j] += Y[i * c + j] * (dY[i * c + j] - dot);
    }
  });
}

Var log_softmax_rows(Var a) {
  const Tensor& X = a.value();
  require_rank2("log_softmax_rows", X);
  Tensor y = X;
  const std::size_t r = X.rows(), c = X.cols();
  for (std::size_t i = 0; i < r; ++i) {
    double* row = y.data().data() + i * c;
    const double mx = *std::max_element(row, row + c);
    double total = 0.0;
    for (std::size_t j = 0; j < c; ++j) total += std::exp(row[j] - mx);
    const double lse = mx + std::log(total);
    for (std::size_t j = 0; j < c; ++j) row[j] -= lse;
  }
  return a.graph().record(std::move(y), {a.id()}, [ia = a.id()](Graph& g, NodeId self) {
    if (!g.requires_grad(ia)) return;
    const Tensor& Y = g.value(self);
    const Tensor& dY = g.grad(self);
    Tensor& dX = g.grad_buffer(ia);
    const std::size_t r = Y.rows(), c = Y.cols();
    for (std::size_t i = 0; i < r; ++i) {
      double total = 0.0;
      for (std::size_t j = 0; j < c; ++j) total += dY[i * c + j];
      for (std::size_t j = 0; j < c; ++j) dX[i * c + j] += dY[i * c + j] - std::exp(Y[i * c + j]) * total;
    }
  });
}

Var sum(Var a) {
  double total = 0.0;
  for (double x : a.value().data()) total += x;
  return a.graph().record(Tensor::filled(1, 1, total), {a.id()}, [ia = a.id()](Graph& g, NodeId self) {
    if (!g.requires_grad(ia)) return;
    const double d = g.grad(self)[0];
    for (auto& x : g.grad_buffer(ia).data()) x += d;
  });
}

Var mean(Var a) { return scale(sum(a), 1.0 / static_cast<double>(a.value().size())); }

Var row_sum(Var a) {
  const Tensor& X = a.value();
  require_rank2("row_sum", X);
  Tensor y = Tensor::zeros(X.rows(), 1);
  view(y).col(0) = view(X).rowwise().sum();
  return a.graph().record(std::move(y), {a.id()}, [ia = a.id()](Graph& g, NodeId self) {
    if (!g.requires_grad(ia)) return;
    view(g.grad_buffer(ia)).colwise() += view(g.grad(self)).col(0);
  });
}

Var reshape(Var a, std::size_t rows, std::size_t cols) {
  const Tensor& X = a.value();
  if (rows * cols != X.size()) {
    throw std::invalid_argument("reshape: cannot view " + shape_string(X.shape()) + " as " +
                                std::to_string(rows) + "x" + std::to_string(cols));
  }
  Tensor y({rows, cols}, X.storage());
  return a.graph().record(std::move(y), {a.id()}, [ia = a.id()](Graph& g, NodeId self) {
    if (g.requires_grad(ia)) accumulate(g.grad_buffer(ia), g.grad(self));
  });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: no inputs");
  Graph& graph = parts.front().graph();
  const std::size_t rows = parts.front().value().rows();
  std::size_t total = 0;
  std::vector<NodeId> ids;
  std::vector<std::size_t> widths;
  for (const Var& p : parts) {
    if (&p.graph() != &graph) throw std::invalid_argument("operands belong to different graphs");
    const Tensor& t = p.value();
    require_rank2("concat_cols", t);
    if (t.rows() != rows) shape_error("concat_cols", parts.front().value(), t);
    ids.push_back(p.id());
    widths.push_back(t.cols());
    total += t.cols();
  }
  Tensor y = Tensor::zeros(rows, total);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    view(y).middleCols(offset, widths[k]) = view(parts[k].value());
    offset += widths[k];
  }
  return graph.record(std::move(y), ids, [ids, widths](Graph& g, NodeId self) {
    const Tensor& dY = g.grad(self);
    std::size_t off = 0;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (g.requires_grad(ids[k])) view(g.grad_buffer(ids[k])) += view(dY).middleCols(off, widths[k]);
      off += widths[k];
    }
  });
}

Var pick(Var a, std::span<const std::size_t> cols) {
  const Tensor& X = a.value();
  require_rank2("pick", X);
  if (cols.size() != X.rows()) throw std::invalid_argument("pick: need one column index per row");
  Tensor y = Tensor::zeros(X.rows(), 1);
  for (std::size_t i = 0; i < X.rows(); ++i) {
    if (cols[i] >= X.cols()) throw std::invalid_argument("pick: column index out of range");
    y[i] = X(i, cols[i]);
  }
  std::vector<std::size_t> idx(cols.begin(), cols.end());
  return a.graph().record(std::move(y), {a.id()}, [ia = a.id(), idx = std::move(idx)](Graph& g, NodeId self) {
    if (!g.requires_grad(ia)) return;
    Tensor& dX = g.grad_buffer(ia);
    const Tensor& dY = g.grad(self);
    for (std::size_t i = 0; i < idx.size(); ++i) dX(i, idx[i]) += dY[i];
  });
}

namespace {

template <typename Cmp>
Var select(Var a, Var b, const char* name, Cmp first_wins) {
  require_same_graph(a, b);
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  if (!A.same_shape(B)) shape_error(name, A, B);
  Tensor C = A;
  for (std::size_t i = 0; i < C.size(); ++i) C[i] = first_wins(A[i], B[i]) ? A[i] : B[i];
  return a.graph().record(std::move(C), {a.id(), b.id()},
                          [ia = a.id(), ib = b.id(), first_wins](Graph& g, NodeId self) {
                            const Tensor& Av = g.value(ia);
                            const Tensor& Bv = g.value(ib);
                            const Tensor& dC = g.grad(self);
                            const bool ga = g.requires_grad(ia), gb = g.requires_grad(ib);
                            for (std::size_t i = 0; i < dC.size(); ++i) {
                              if (first_wins(Av[i], Bv[i])) {
                                if (ga) g.grad_buffer(ia)[i] += dC[i];
                              } else if (gb) {
                                g.grad_buffer(ib)[i] += dC[i];
                              }
                            }
                          });
}

}  // namespace

Var minimum(Var a, Var b) {
  return select(a, b, "minimum", [](double x, double y) { return x <= y; });
}

Var maximum(Var a, Var b) {
  return select(a, b, "maximum", [](double x, double y) { return x >= y; });
}

Var clip(Var a, double lo, double hi) {
  if (!(lo <= hi)) throw std::invalid_argument("clip: lo must not exceed hi");
  Tensor y = a.value();
  for (auto& x : y.data()) x = std::clamp(x, lo, hi);
  return unary(a, std::move(y), [lo, hi](double xv, double) { return (xv >= lo && xv <= hi) ? 1.0 : 0.0; });
}

}  // namespace lsamarl::ops
