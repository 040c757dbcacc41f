#include "aomd/nn/tape.hpp"

#include "aomd/error.hpp"

namespace aomd::nn {

const Tensor& Var::value() const { return tape_->value(id_); }
const Tensor& Var::grad() const { return tape_->grad_view(id_); }

Tape::Tape(ParameterStore* store, bool grad_enabled) : store_(store), grad_enabled_(grad_enabled) {}

// Gradients are disabled, so nothing is ever written through the pointer.
Tape::Tape(const ParameterStore& store) : store_(const_cast<ParameterStore*>(&store)), grad_enabled_(false) {}

Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

namespace {

void check_leaf(const char* kind, const Tensor& value) {
  if (!value.all_finite()) throw NumericError(std::string(kind) + " leaf holds a non-finite value");
}

}  // namespace

Var Tape::constant(Tensor value) {
  check_leaf("constant", value);
  Node n;
  n.op = "constant";
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::input(Tensor value) {
  check_leaf("input", value);
  Node n;
  n.op = "input";
  n.value = std::move(value);
  n.requires_grad = grad_enabled_;
  return push(std::move(n));
}

Var Tape::parameter(const std::string& name) {
  if (store_ == nullptr) throw ConfigError("tape has no parameter store");
  Parameter& p = store_->at(name);
  Node n;
  n.op = "parameter";
  n.param = &p;
  n.requires_grad = grad_enabled_;
  return push(std::move(n));
}

Var Tape::record(const char* op, Tensor value, std::initializer_list<Var> inputs,
                 Backward backward) {
  return record(op, std::move(value), std::vector<Var>(inputs), std::move(backward));
}

Var Tape::record(const char* op, Tensor value, const std::vector<Var>& inputs, Backward backward) {
  if (!value.all_finite()) {
    throw NumericError(std::string("op '") + op + "' produced a non-finite value");
  }
  Node n;
  n.op = op;
  n.value = std::move(value);
  for (const Var& in : inputs) {
    if (in.tape() != this) throw ShapeError(std::string("op '") + op + "' mixes tapes");
    if (nodes_[in.id()].requires_grad) n.requires_grad = true;
  }
  if (n.requires_grad) n.backward = std::move(backward);
  return push(std::move(n));
}

Tensor& Tape::grad(std::uint32_t id) {
  Node& n = nodes_[id];
  if (n.param != nullptr) return n.param->grad;
  if (n.grad.size() != n.value.size()) n.grad = Tensor::zeros_like(n.value);
  return n.grad;
}

void Tape::backward(Var loss, double seed) {
  if (loss.tape() != this) throw ShapeError("backward called with a foreign variable");
  if (value(loss.id()).size() != 1) {
    throw ShapeError("backward needs a single-element loss, got shape " +
                     value(loss.id()).shape_string());
  }
  if (!nodes_[loss.id()].requires_grad) return;
  grad(loss.id())[0] += seed;
  for (std::uint32_t i = loss.id() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.backward || n.grad.size() != n.value.size()) continue;
    if (!n.grad.all_finite()) {
      throw NumericError(std::string("gradient of op '") + n.op + "' is not finite");
    }
    n.backward(*this, i);
  }
}

}  // namespace aomd::nn
