#pragma once

#include "motionstyle/nn/tensor.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace motionstyle::nn {

/// One value in a dynamically recorded computation graph. Gradients flow to
/// parents through `backward`, which reads `grad` and accumulates into the
/// parents' gradients.
template <typename T>
struct Node {
  Tensor<T> value;
  Tensor<T> grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(const Tensor<T>&)> backward;

  /// Lazily allocates the gradient buffer.
  Tensor<T>& grad_buffer() {
    if (grad.empty() && !value.empty()) grad = Tensor<T>(value.n(), value.t(), value.c());
    return grad;
  }
};

template <typename T>
class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node<T>> node) : node_(std::move(node)) {}

  const Tensor<T>& value() const { return node_->value; }
  Tensor<T>& mutable_value() { return node_->value; }
  const Tensor<T>& grad() const { return node_->grad; }
  Tensor<T>& grad_buffer() { return node_->grad_buffer(); }
  bool requires_grad() const { return node_ && node_->requires_grad; }
  bool defined() const { return static_cast<bool>(node_); }

  void zero_grad() {
    if (!node_->grad.empty()) node_->grad.fill(T(0));
  }
  void set_requires_grad(bool on) { node_->requires_grad = on; }

  Node<T>* node() const { return node_.get(); }
  const std::shared_ptr<Node<T>>& shared() const { return node_; }

  int n() const { return node_->value.n(); }
  int t() const { return node_->value.t(); }
  int c() const { return node_->value.c(); }

  /// Scalar read for [1,1,1] values.
  T item() const { return node_->value[0]; }

 private:
  std::shared_ptr<Node<T>> node_;
};

template <typename T>
Var<T> constant(Tensor<T> value) {
  auto node = std::make_shared<Node<T>>();
  node->value = std::move(value);
  return Var<T>(std::move(node));
}

template <typename T>
Var<T> leaf(Tensor<T> value, bool requires_grad = true) {
  auto node = std::make_shared<Node<T>>();
  node->value = std::move(value);
  node->requires_grad = requires_grad;
  return Var<T>(std::move(node));
}

/// Disables graph recording on the current thread while alive.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled();

/// Creates the output node of an op. When any input requires a gradient (and
/// recording is enabled) the node keeps its inputs alive and stores `fn`.
template <typename T>
Var<T> record(Tensor<T> value, std::vector<Var<T>> inputs,
              std::function<void(const Tensor<T>&)> fn) {
  auto node = std::make_shared<Node<T>>();
  node->value = std::move(value);
  if (grad_enabled()) {
    for (const auto& in : inputs) {
      if (in.requires_grad()) {
        node->requires_grad = true;
        break;
      }
    }
  }
  if (node->requires_grad) {
    node->parents.reserve(inputs.size());
    for (auto& in : inputs) node->parents.push_back(in.shared());
    node->backward = std::move(fn);
  }
  return Var<T>(std::move(node));
}

/// Reverse-mode sweep from a scalar root. Leaf gradients accumulate.
template <typename T>
void backward(const Var<T>& root);

}  // namespace motionstyle::nn
