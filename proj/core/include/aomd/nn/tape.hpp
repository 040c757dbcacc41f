#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <string>

#include "aomd/nn/params.hpp"
#include "aomd/nn/tensor.hpp"

namespace aomd::nn {

class Tape;

// Handle to a value recorded on a Tape.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  const Tensor& grad() const;
  Tape* tape() const { return tape_; }
  std::uint32_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }
  const std::vector<std::size_t>& shape() const { return value().shape(); }

 private:
  friend class Tape;
  Var(Tape* tape, std::uint32_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::uint32_t id_ = 0;
};

// Reverse-mode differentiation record. Every op appends a node holding its
// value and a closure that propagates the node's gradient to its inputs;
// backward() replays the closures in reverse order and adds the gradients of
// parameter leaves into the ParameterStore.
//
// Nodes that do not depend on any parameter (or on a constant marked as
// differentiable) carry no closure, so inference on a tape costs only the
// forward arithmetic.
class Tape {
 public:
  using Backward = std::function<void(Tape&, std::uint32_t self)>;

  // With grad_enabled = false parameters are read as constants.
  explicit Tape(ParameterStore* store = nullptr, bool grad_enabled = true);
  // Inference tape over a read-only store.
  explicit Tape(const ParameterStore& store);

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaves throw NumericError on a non-finite value.
  Var constant(Tensor value);
  // A leaf that receives a gradient but is not stored anywhere; used for
  // gradient checks with respect to inputs.
  Var input(Tensor value);
  Var parameter(const std::string& name);

  // Appends an op node. Throws NumericError if `value` is not finite. The
  // closure is dropped when no input requires a gradient.
  Var record(const char* op, Tensor value, std::initializer_list<Var> inputs, Backward backward);
  Var record(const char* op, Tensor value, const std::vector<Var>& inputs, Backward backward);

  bool requires_grad(Var v) const { return nodes_[v.id()].requires_grad; }
  bool requires_grad(std::uint32_t id) const { return nodes_[id].requires_grad; }
  const Tensor& value(std::uint32_t id) const {
    const Node& n = nodes_[id];
    return n.param != nullptr ? n.param->value : n.value;
  }
  // Gradient accumulator of a node, allocated on first use. For parameter
  // leaves this is the store's gradient tensor itself.
  Tensor& grad(std::uint32_t id);
  const Tensor& grad_view(std::uint32_t id) const {
    const Node& n = nodes_[id];
    return n.param != nullptr ? n.param->grad : n.grad;
  }

  // Seeds d(loss) = seed on a single-element node and propagates. Parameter
  // gradients are added to (not assigned into) the store; the store and its
  // values must outlive the tape and stay unmodified while it is in use. Throws NumericError
  // naming the op whose gradient became non-finite.
  void backward(Var loss, double seed = 1.0);

  std::size_t size() const { return nodes_.size(); }
  bool grad_enabled() const { return grad_enabled_; }

 private:
  struct Node {
    const char* op = "";
    Tensor value;
    Tensor grad;
    Backward backward;
    Parameter* param = nullptr;
    bool requires_grad = false;
  };

  Var push(Node node);

  ParameterStore* store_;
  bool grad_enabled_;
  std::deque<Node> nodes_;
};

}  // namespace aomd::nn
