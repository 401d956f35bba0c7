#include "lsamarl/tensor/graph.hpp"

#include <stdexcept>

namespace lsamarl {

ParamId ParamSet::add(std::string name, Tensor value) {
  if (find(name)) throw std::invalid_argument("duplicate parameter name: " + name);
  names_.push_back(std::move(name));
  values_.push_back(std::move(value));
  return values_.size() - 1;
}

std::optional<ParamId> ParamSet::find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

ParamId ParamSet::require(std::string_view name) const {
  auto id = find(name);
  if (!id) throw std::invalid_argument("unknown parameter: " + std::string(name));
  return *id;
}

std::size_t ParamSet::element_count() const {
  std::size_t n = 0;
  for (const auto& v : values_) n += v.size();
  return n;
}

const Tensor& Var::value() const { return graph_->value(id_); }

Var Graph::constant(Tensor value) {
  Node node;
  node.value = std::move(value);
  nodes_.push_back(std::move(node));
  return {this, nodes_.size() - 1};
}

Var Graph::param(const ParamSet& params, ParamId id) {
  Node node;
  node.external = &params.value(id);
  node.param = id;
  node.requires_grad = true;
  nodes_.push_back(std::move(node));
  return {this, nodes_.size() - 1};
}

Var Graph::record(Tensor value, std::vector<NodeId> inputs, BackwardFn backward) {
  Node node;
  node.value = std::move(value);
  for (NodeId in : inputs) {
    if (in >= nodes_.size()) throw std::logic_error("graph input refers to a later node");
    node.requires_grad = node.requires_grad || nodes_[in].requires_grad;
  }
  node.inputs = std::move(inputs);
  if (node.requires_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return {this, nodes_.size() - 1};
}

const Tensor& Graph::value(NodeId id) const {
  const Node& n = nodes_.at(id);
  return n.external ? *n.external : n.value;
}

Tensor& Graph::grad_buffer(NodeId id) {
  Node& n = nodes_[id];
  if (n.grad.empty()) n.grad = Tensor(value(id).shape(), 0.0);
  return n.grad;
}

GradientMap Graph::backward(Var loss) {
  if (&loss.graph() != this) throw std::invalid_argument("loss belongs to a different graph");
  if (backward_done_) throw std::logic_error("backward() called twice on the same graph");
  const Tensor& out = value(loss.id());
  if (out.size() != 1) {
    throw std::invalid_argument("backward() needs a scalar loss, got shape " +
                                shape_string(out.shape()));
  }
  backward_done_ = true;
  grad_buffer(loss.id())[0] = 1.0;
  for (NodeId i = loss.id() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.backward || n.grad.empty()) continue;
    n.backward(*this, i);
  }
  GradientMap grads;
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (!n.param) continue;
    Tensor g = n.grad.empty() ? Tensor(value(i).shape(), 0.0) : n.grad;
    auto [it, inserted] = grads.try_emplace(*n.param, std::move(g));
    if (!inserted && !n.grad.empty()) {
      auto dst = it->second.data();
      auto src = n.grad.data();
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
    }
  }
  return grads;
}

}  // namespace lsamarl
