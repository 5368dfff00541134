// Copyright 2026 The asrlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense float64 tensors with tape-based reverse-mode differentiation.
//
// Operations are recorded only while a Tape is alive on the current thread
// and at least one input requires a gradient. Without an active tape every
// operation is a plain forward computation, which is what decoders and
// finite-difference probes use.

#ifndef ASRLAB_TENSOR_H_
#define ASRLAB_TENSOR_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace asrlab {

// All recoverable failures in the library are reported with this type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Shape = std::vector<std::size_t>;

std::string ShapeString(const Shape& shape);
std::size_t ShapeSize(const Shape& shape);

namespace detail {

struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;
  bool requires_grad = false;
  const char* op = "leaf";
  std::vector<std::shared_ptr<Node>> inputs;
  // Reads this node's grad and accumulates into the inputs' grads.
  std::function<void(Node&)> backward;

  std::vector<double>& EnsureGrad();
};

}  // namespace detail

class Tensor {
 public:
  Tensor() = default;

  static Tensor Zeros(Shape shape, bool requires_grad = false);
  static Tensor Filled(Shape shape, double value, bool requires_grad = false);
  static Tensor FromValues(Shape shape, std::vector<double> values,
                           bool requires_grad = false);
  static Tensor Scalar(double value, bool requires_grad = false);
  // 1 x n matrix.
  static Tensor Row(std::vector<double> values, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t size() const;
  // Rank-2 views; rank-0/1 tensors are treated as a single row.
  std::size_t rows() const;
  std::size_t cols() const;

  std::span<const double> values() const;
  // Direct write access; only meaningful for leaves (parameters, inputs).
  std::span<double> mutable_values();
  double at(std::size_t r, std::size_t c) const;
  double item() const;

  bool requires_grad() const;
  void set_requires_grad(bool on);
  // Empty span when no gradient has been accumulated.
  std::span<const double> grad() const;
  std::span<double> mutable_grad();
  void ZeroGrad();

  // Fresh leaf carrying a copy of the values.
  Tensor Detach() const;
  Tensor Clone() const;

  detail::Node* node() const { return node_.get(); }
  const std::shared_ptr<detail::Node>& shared_node() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<detail::Node> node_;

  friend Tensor MakeOp(const char*, Shape, std::vector<double>,
                       const std::vector<Tensor>&,
                       std::function<void(detail::Node&)>);
};

// Ordered record of the differentiable operations executed while it is the
// active tape. Construction activates it; destruction restores the previous
// one. Not copyable or movable.
class Tape {
 public:
  Tape();
  ~Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Reverse sweep from a scalar loss recorded on this tape (or a leaf). Run
  // it once per tape: intermediate gradients are not reset afterwards.
  void Backward(const Tensor& loss);
  std::size_t size() const { return nodes_.size(); }

  static Tape* Active();

 private:
  friend Tensor MakeOp(const char*, Shape, std::vector<double>,
                       const std::vector<Tensor>&,
                       std::function<void(detail::Node&)>);
  std::vector<std::shared_ptr<detail::Node>> nodes_;
  Tape* previous_;
};

// Backward on the currently active tape.
void Backward(const Tensor& loss);

// Builds an operation result. `backward` is invoked during the reverse sweep
// with the output node; input i is node.inputs[i] (empty when nothing is
// recorded). Non-finite outputs raise Error naming the operation.
Tensor MakeOp(const char* op, Shape shape, std::vector<double> value,
              const std::vector<Tensor>& inputs,
              std::function<void(detail::Node&)> backward);

// Numerically stable log(sum(exp(xs))). -inf entries contribute nothing; an
// all -inf input yields -inf.
double LogSumExp(std::span<const double> xs);
double LogAddExp(double a, double b);

}  // namespace asrlab

#endif  // ASRLAB_TENSOR_H_
