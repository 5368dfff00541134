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

#include "asrlab/tensor.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace asrlab {

namespace {

thread_local Tape* g_active_tape = nullptr;

std::shared_ptr<detail::Node> NewNode(Shape shape, std::vector<double> value,
                                      bool requires_grad) {
  if (value.size() != ShapeSize(shape)) {
    throw Error("tensor: " + std::to_string(value.size()) +
                " values do not fill shape " + ShapeString(shape));
  }
  for (std::size_t d : shape) {
    if (d == 0) throw Error("tensor: zero extent in shape " + ShapeString(shape));
  }
  auto node = std::make_shared<detail::Node>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  node->requires_grad = requires_grad;
  return node;
}

}  // namespace

std::string ShapeString(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << " x ";
    os << shape[i];
  }
  os << ']';
  return os.str();
}

std::size_t ShapeSize(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::vector<double>& detail::Node::EnsureGrad() {
  if (grad.empty()) grad.assign(value.size(), 0.0);
  return grad;
}

Tensor Tensor::Zeros(Shape shape, bool requires_grad) {
  return Filled(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::Filled(Shape shape, double value, bool requires_grad) {
  std::vector<double> v(ShapeSize(shape), value);
  return Tensor(NewNode(std::move(shape), std::move(v), requires_grad));
}

Tensor Tensor::FromValues(Shape shape, std::vector<double> values,
                          bool requires_grad) {
  for (double v : values) {
    if (!std::isfinite(v)) throw Error("tensor: non-finite value in " + ShapeString(shape));
  }
  return Tensor(NewNode(std::move(shape), std::move(values), requires_grad));
}

Tensor Tensor::Scalar(double value, bool requires_grad) {
  return FromValues({1, 1}, {value}, requires_grad);
}

Tensor Tensor::Row(std::vector<double> values, bool requires_grad) {
  std::size_t n = values.size();
  return FromValues({1, n}, std::move(values), requires_grad);
}

const Shape& Tensor::shape() const {
  if (!node_) throw Error("tensor: use of undefined tensor");
  return node_->shape;
}

std::size_t Tensor::size() const { return ShapeSize(shape()); }

std::size_t Tensor::rows() const {
  const Shape& s = shape();
  if (s.size() > 2) throw Error("tensor: rows() on rank " + std::to_string(s.size()));
  return s.size() == 2 ? s[0] : 1;
}

std::size_t Tensor::cols() const {
  const Shape& s = shape();
  if (s.size() > 2) throw Error("tensor: cols() on rank " + std::to_string(s.size()));
  if (s.empty()) return 1;
  return s.back();
}

std::span<const double> Tensor::values() const {
  shape();
  return node_->value;
}

std::span<double> Tensor::mutable_values() {
  shape();
  return node_->value;
}

double Tensor::at(std::size_t r, std::size_t c) const {
  return node_->value[r * cols() + c];
}

double Tensor::item() const {
  if (size() != 1) throw Error("tensor: item() on shape " + ShapeString(shape()));
  return node_->value[0];
}

bool Tensor::requires_grad() const { return node_ && node_->requires_grad; }

void Tensor::set_requires_grad(bool on) {
  shape();
  node_->requires_grad = on;
}

std::span<const double> Tensor::grad() const {
  shape();
  return node_->grad;
}

std::span<double> Tensor::mutable_grad() {
  shape();
  return node_->EnsureGrad();
}

void Tensor::ZeroGrad() {
  shape();
  std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

Tensor Tensor::Detach() const {
  return FromValues(shape(), node_->value, false);
}

Tensor Tensor::Clone() const {
  return FromValues(shape(), node_->value, node_->requires_grad);
}

Tape::Tape() : previous_(g_active_tape) { g_active_tape = this; }

Tape::~Tape() { g_active_tape = previous_; }

Tape* Tape::Active() { return g_active_tape; }

void Tape::Backward(const Tensor& loss) {
  if (loss.size() != 1) {
    throw Error("backward: loss must be scalar, got shape " +
                ShapeString(loss.shape()));
  }
  detail::Node* root = loss.node();
  loss.node()->EnsureGrad()[0] += 1.0;
  if (root->backward == nullptr) return;  // leaf loss

  auto it = std::find_if(nodes_.rbegin(), nodes_.rend(),
                         [root](const auto& n) { return n.get() == root; });
  if (it == nodes_.rend()) {
    throw Error("backward: loss was not produced on this tape");
  }
  for (; it != nodes_.rend(); ++it) {
    detail::Node& node = **it;
    if (node.grad.empty()) continue;
    node.backward(node);
  }
}

void Backward(const Tensor& loss) {
  if (Tape::Active() == nullptr) throw Error("backward: no active tape");
  Tape::Active()->Backward(loss);
}

Tensor MakeOp(const char* op, Shape shape, std::vector<double> value,
              const std::vector<Tensor>& inputs,
              std::function<void(detail::Node&)> backward) {
  for (double v : value) {
    if (!std::isfinite(v)) {
      throw Error(std::string(op) + ": non-finite value in output");
    }
  }
  bool record = false;
  if (g_active_tape != nullptr) {
    for (const Tensor& t : inputs) {
      if (t.requires_grad()) {
        record = true;
        break;
      }
    }
  }
  auto node = NewNode(std::move(shape), std::move(value), record);
  node->op = op;
  if (record) {
    node->inputs.reserve(inputs.size());
    for (const Tensor& t : inputs) node->inputs.push_back(t.shared_node());
    node->backward = std::move(backward);
    g_active_tape->nodes_.push_back(node);
  }
  return Tensor(std::move(node));
}

double LogSumExp(std::span<const double> xs) {
  if (xs.empty()) throw Error("logsumexp: empty input");
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

double LogAddExp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace asrlab
