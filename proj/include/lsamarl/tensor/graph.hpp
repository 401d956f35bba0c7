#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lsamarl/tensor/tensor.hpp"

namespace lsamarl {

using NodeId = std::size_t;
using ParamId = std::size_t;

/// Ordered collection of named learnable tensors.
class ParamSet {
 public:
  ParamId add(std::string name, Tensor value);

  std::size_t size() const { return values_.size(); }
  const std::string& name(ParamId id) const { return names_.at(id); }
  Tensor& value(ParamId id) { return values_.at(id); }
  const Tensor& value(ParamId id) const { return values_.at(id); }
  std::optional<ParamId> find(std::string_view name) const;
  ParamId require(std::string_view name) const;

  std::size_t element_count() const;

  friend bool operator==(const ParamSet&, const ParamSet&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<Tensor> values_;
};

using GradientMap = std::map<ParamId, Tensor>;

class Graph;

/// Handle to a node of a Graph. Cheap to copy; only valid while the graph lives.
class Var {
 public:
  Var() = default;
  Var(Graph* graph, NodeId id) : graph_(graph), id_(id) {}

  Graph& graph() const { return *graph_; }
  NodeId id() const { return id_; }
  const Tensor& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }

 private:
  Graph* graph_ = nullptr;
  NodeId id_ = 0;
};

/// Dynamic reverse-mode tape. Nodes are appended in evaluation order, so the
/// node list is always topologically sorted.
class Graph {
 public:
  // Accumulates the incoming gradient of node `self` into its inputs.
  using BackwardFn = std::function<void(Graph&, NodeId self)>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Tensor value);
  // Leaf bound to a parameter. The tensor is referenced, not copied; the
  // ParamSet must outlive the graph and stay unmodified until backward().
  Var param(const ParamSet& params, ParamId id);
  Var record(Tensor value, std::vector<NodeId> inputs, BackwardFn backward);

  const Tensor& value(NodeId id) const;
  bool requires_grad(NodeId id) const { return nodes_[id].requires_grad; }
  const Tensor& grad(NodeId id) const { return nodes_[id].grad; }
  // Gradient buffer of `id`, zero-initialised on first access.
  Tensor& grad_buffer(NodeId id);

  std::size_t size() const { return nodes_.size(); }

  /// Reverse sweep from a 1x1 loss. Returns a gradient for every parameter
  /// leaf in the graph, zero when the loss does not depend on it.
  GradientMap backward(Var loss);

 private:
  struct Node {
    Tensor value;
    const Tensor* external = nullptr;
    Tensor grad;
    std::vector<NodeId> inputs;
    BackwardFn backward;
    std::optional<ParamId> param;
    bool requires_grad = false;
  };

  std::vector<Node> nodes_;
  bool backward_done_ = false;
};

}  // namespace lsamarl
