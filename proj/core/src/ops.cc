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

#include "asrlab/ops.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace asrlab {

namespace {

using detail::Node;

// Gradient buffer of input i, or nullptr when it does not need one.
std::vector<double>* InGrad(Node& out, std::size_t i) {
  Node& in = *out.inputs[i];
  if (!in.requires_grad) return nullptr;
  return &in.EnsureGrad();
}

const std::vector<double>& InValue(Node& out, std::size_t i) {
  return out.inputs[i]->value;
}

void RequireRank2(const char* op, const Tensor& a) {
  if (a.rank() != 2) {
    throw Error(std::string(op) + ": expected rank-2 operand, got " +
                ShapeString(a.shape()));
  }
}

void RequireSameShape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw Error(std::string(op) + ": shape mismatch " + ShapeString(a.shape()) +
                " vs " + ShapeString(b.shape()));
  }
}

template <typename Fwd, typename Deriv>
Tensor Unary(const char* op, const Tensor& a, Fwd fwd, Deriv deriv) {
  std::vector<double> out(a.size());
  auto av = a.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(av[i]);
  return MakeOp(op, a.shape(), std::move(out), {a}, [deriv](Node& n) {
    auto* g = InGrad(n, 0);
    if (!g) return;
    const auto& x = InValue(n, 0);
    for (std::size_t i = 0; i < n.grad.size(); ++i) {
      (*g)[i] += n.grad[i] * deriv(x[i], n.value[i]);
    }
  });
}

}  // namespace

Tensor MatMul(const Tensor& a, const Tensor& b) {
  RequireRank2("matmul", a);
  RequireRank2("matmul", b);
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  if (b.rows() != k) {
    throw Error("matmul: shape mismatch " + ShapeString(a.shape()) + " x " +
                ShapeString(b.shape()));
  }
  std::vector<double> out(m * n, 0.0);
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < m; ++i) {
    double* orow = out.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = av[i * k + p];
      if (aip == 0.0) continue;
      const double* brow = bv.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += aip * brow[j];
    }
  }
  return MakeOp("matmul", {m, n}, std::move(out), {a, b}, [m, k, n](Node& nd) {
    const auto& A = InValue(nd, 0);
    const auto& B = InValue(nd, 1);
    const auto& G = nd.grad;
    if (auto* ga = InGrad(nd, 0)) {
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          double s = 0.0;
          for (std::size_t j = 0; j < n; ++j) s += G[i * n + j] * B[p * n + j];
          (*ga)[i * k + p] += s;
        }
      }
    }
    if (auto* gb = InGrad(nd, 1)) {
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          const double aip = A[i * k + p];
          if (aip == 0.0) continue;
          for (std::size_t j = 0; j < n; ++j) (*gb)[p * n + j] += aip * G[i * n + j];
        }
      }
    }
  });
}

Tensor MatMulNT(const Tensor& a, const Tensor& b) {
  RequireRank2("matmul_nt", a);
  RequireRank2("matmul_nt", b);
  const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
  if (b.cols() != k) {
    throw Error("matmul_nt: shape mismatch " + ShapeString(a.shape()) +
                " x transpose of " + ShapeString(b.shape()));
  }
  std::vector<double> out(m * n);
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) s += av[i * k + p] * bv[j * k + p];
      out[i * n + j] = s;
    }
  }
  return MakeOp("matmul_nt", {m, n}, std::move(out), {a, b}, [m, k, n](Node& nd) {
    const auto& A = InValue(nd, 0);
    const auto& B = InValue(nd, 1);
    const auto& G = nd.grad;
    auto* ga = InGrad(nd, 0);
    auto* gb = InGrad(nd, 1);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double g = G[i * n + j];
        if (g == 0.0) continue;
        for (std::size_t p = 0; p < k; ++p) {
          if (ga) (*ga)[i * k + p] += g * B[j * k + p];
          if (gb) (*gb)[j * k + p] += g * A[i * k + p];
        }
      }
    }
  });
}

Tensor Transpose(const Tensor& a) {
  RequireRank2("transpose", a);
  const std::size_t m = a.rows(), n = a.cols();
  std::vector<double> out(m * n);
  auto av = a.values();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = av[i * n + j];
  return MakeOp("transpose", {n, m}, std::move(out), {a}, [m, n](Node& nd) {
    auto* g = InGrad(nd, 0);
    if (!g) return;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) (*g)[i * n + j] += nd.grad[j * m + i];
  });
}

Tensor Add(const Tensor& a, const Tensor& b) {
  RequireSameShape("add", a, b);
  std::vector<double> out(a.size());
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  return MakeOp("add", a.shape(), std::move(out), {a, b}, [](Node& nd) {
    for (std::size_t k = 0; k < 2; ++k) {
      if (auto* g = InGrad(nd, k))
        for (std::size_t i = 0; i < nd.grad.size(); ++i) (*g)[i] += nd.grad[i];
    }
  });
}

Tensor Sub(const Tensor& a, const Tensor& b) {
  RequireSameShape("sub", a, b);
  std::vector<double> out(a.size());
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
  return MakeOp("sub", a.shape(), std::move(out), {a, b}, [](Node& nd) {
    if (auto* g = InGrad(nd, 0))
      for (std::size_t i = 0; i < nd.grad.size(); ++i) (*g)[i] += nd.grad[i];
    if (auto* g = InGrad(nd, 1))
      for (std::size_t i = 0; i < nd.grad.size(); ++i) (*g)[i] -= nd.grad[i];
  });
}

Tensor Mul(const Tensor& a, const Tensor& b) {
  RequireSameShape("mul", a, b);
  std::vector<double> out(a.size());
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  return MakeOp("mul", a.shape(), std::move(out), {a, b}, [](Node& nd) {
    const auto& A = InValue(nd, 0);
    const auto& B = InValue(nd, 1);
    if (auto* g = InGrad(nd, 0))
      for (std::size_t i = 0; i < nd.grad.size(); ++i) (*g)[i] += nd.grad[i] * B[i];
    if (auto* g = InGrad(nd, 1))
      for (std::size_t i = 0; i < nd.grad.size(); ++i) (*g)[i] += nd.grad[i] * A[i];
  });
}

Tensor Div(const Tensor& a, const Tensor& b) {
  RequireSameShape("div", a, b);
  std::vector<double> out(a.size());
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] / bv[i];
  return MakeOp("div", a.shape(), std::move(out), {a, b}, [](Node& nd) {
    const auto& B = InValue(nd, 1);
    if (auto* g = InGrad(nd, 0))
      for (std::size_t i = 0; i < nd.grad.size(); ++i) (*g)[i] += nd.grad[i] / B[i];
    if (auto* g = InGrad(nd, 1))
      for (std::size_t i = 0; i < nd.grad.size(); ++i)
        (*g)[i] -= nd.grad[i] * nd.value[i] / B[i];
  });
}

Tensor Scale(const Tensor& a, double s) {
  std::vector<double> out(a.values().begin(), a.values().end());
  for (double& v : out) v *= s;
  return MakeOp("scale", a.shape(), std::move(out), {a}, [s](Node& nd) {
    if (auto* g = InGrad(nd, 0))
      for (std::size_t i = 0; i < nd.grad.size(); ++i) (*g)[i] += s * nd.grad[i];
  });
}

Tensor AddBias(const Tensor& a, const Tensor& bias) {
  RequireRank2("add_bias", a);
  const std::size_t m = a.rows(), n = a.cols();
  if (bias.size() != n || bias.rows() != 1) {
    throw Error("add_bias: bias shape " + ShapeString(bias.shape()) +
                " does not match " + ShapeString(a.shape()));
  }
  std::vector<double> out(a.values().begin(), a.values().end());
  auto bv = bias.values();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] += bv[j];
  return MakeOp("add_bias", a.shape(), std::move(out), {a, bias}, [m, n](Node& nd) {
    if (auto* g = InGrad(nd, 0))
      for (std::size_t i = 0; i < nd.grad.size(); ++i) (*g)[i] += nd.grad[i];
    if (auto* g = InGrad(nd, 1))
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) (*g)[j] += nd.grad[i * n + j];
  });
}

Tensor BroadcastRows(const Tensor& row, std::size_t n_rows) {
  if (row.rows() != 1) {
    throw Error("broadcast_rows: expected a single row, got " +
                ShapeString(row.shape()));
  }
  const std::size_t n = row.cols();
  std::vector<double> out(n_rows * n);
  auto rv = row.values();
  for (std::size_t i = 0; i < n_rows; ++i) std::copy(rv.begin(), rv.end(), out.begin() + i * n);
  return MakeOp("broadcast_rows", {n_rows, n}, std::move(out), {row}, [n_rows, n](Node& nd) {
    if (auto* g = InGrad(nd, 0))
      for (std::size_t i = 0; i < n_rows; ++i)
        for (std::size_t j = 0; j < n; ++j) (*g)[j] += nd.grad[i * n + j];
  });
}

Tensor Sigmoid(const Tensor& a) {
  return Unary(
      "sigmoid", a,
      [](double x) {
        if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
        double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor Tanh(const Tensor& a) {
  return Unary(
      "tanh", a, [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor Relu(const Tensor& a) {
  return Unary(
      "relu", a, [](double x) { return x > 0 ? x : 0.0; },
      [](double x, double) { return x > 0 ? 1.0 : 0.0; });
}

Tensor Exp(const Tensor& a) {
  return Unary(
      "exp", a, [](double x) { return std::exp(x); },
      [](double, double y) { return y; });
}

Tensor Log(const Tensor& a) {
  return Unary(
      "log", a, [](double x) { return std::log(x); },
      [](double x, double) { return 1.0 / x; });
}

namespace {

Tensor SoftmaxImpl(const Tensor& a, const Mask* mask) {
  RequireRank2("softmax", a);
  const std::size_t m = a.rows(), n = a.cols();
  if (mask && mask->size() != m * n) {
    throw Error("softmax: mask of " + std::to_string(mask->size()) +
                " entries for shape " + ShapeString(a.shape()));
  }
  std::vector<double> out(m * n, 0.0);
  auto av = a.values();
  for (std::size_t i = 0; i < m; ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (mask && !(*mask)[i * n + j]) continue;
      mx = std::max(mx, av[i * n + j]);
    }
    if (mx == -std::numeric_limits<double>::infinity()) {
      throw Error("softmax: row " + std::to_string(i) + " has no allowed entries");
    }
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (mask && !(*mask)[i * n + j]) continue;
      out[i * n + j] = std::exp(av[i * n + j] - mx);
      s += out[i * n + j];
    }
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] /= s;
  }
  return MakeOp("softmax", a.shape(), std::move(out), {a}, [m, n](Node& nd) {
    auto* g = InGrad(nd, 0);
    if (!g) return;
    for (std::size_t i = 0; i < m; ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < n; ++j) dot += nd.grad[i * n + j] * nd.value[i * n + j];
      for (std::size_t j = 0; j < n; ++j)
        (*g)[i * n + j] += nd.value[i * n + j] * (nd.grad[i * n + j] - dot);
    }
  });
}

}  // namespace

Tensor SoftmaxRows(const Tensor& a) { return SoftmaxImpl(a, nullptr); }

Tensor SoftmaxRows(const Tensor& a, const Mask& mask) { return SoftmaxImpl(a, &mask); }

Tensor LogSoftmaxRows(const Tensor& a) {
  RequireRank2("log_softmax", a);
  const std::size_t m = a.rows(), n = a.cols();
  std::vector<double> out(m * n);
  auto av = a.values();
  for (std::size_t i = 0; i < m; ++i) {
    double lse = LogSumExp(av.subspan(i * n, n));
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = av[i * n + j] - lse;
  }
  return MakeOp("log_softmax", a.shape(), std::move(out), {a}, [m, n](Node& nd) {
    auto* g = InGrad(nd, 0);
    if (!g) return;
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += nd.grad[i * n + j];
      for (std::size_t j = 0; j < n; ++j)
        (*g)[i * n + j] += nd.grad[i * n + j] - std::exp(nd.value[i * n + j]) * s;
    }
  });
}

Tensor ConcatCols(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw Error("concat_cols: no operands");
  const std::size_t m = parts[0].rows();
  std::vector<std::size_t> widths;
  std::size_t n = 0;
  for (const Tensor& p : parts) {
    RequireRank2("concat_cols", p);
    if (p.rows() != m) {
      throw Error("concat_cols: row mismatch " + ShapeString(parts[0].shape()) +
                  " vs " + ShapeString(p.shape()));
    }
    widths.push_back(p.cols());
    n += p.cols();
  }
  std::vector<double> out(m * n);
  std::size_t off = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    auto pv = parts[k].values();
    for (std::size_t i = 0; i < m; ++i)
      std::copy_n(pv.begin() + i * widths[k], widths[k], out.begin() + i * n + off);
    off += widths[k];
  }
  return MakeOp("concat_cols", {m, n}, std::move(out), parts, [m, n, widths](Node& nd) {
    std::size_t off = 0;
    for (std::size_t k = 0; k < widths.size(); ++k) {
      if (auto* g = InGrad(nd, k)) {
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < widths[k]; ++j)
            (*g)[i * widths[k] + j] += nd.grad[i * n + off + j];
      }
      off += widths[k];
    }
  });
}

Tensor ConcatRows(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw Error("concat_rows: no operands");
  const std::size_t n = parts[0].cols();
  std::vector<std::size_t> sizes;
  std::size_t m = 0;
  for (const Tensor& p : parts) {
    RequireRank2("concat_rows", p);
    if (p.cols() != n) {
      throw Error("concat_rows: column mismatch " + ShapeString(parts[0].shape()) +
                  " vs " + ShapeString(p.shape()));
    }
    sizes.push_back(p.size());
    m += p.rows();
  }
  std::vector<double> out;
  out.reserve(m * n);
  for (const Tensor& p : parts) out.insert(out.end(), p.values().begin(), p.values().end());
  return MakeOp("concat_rows", {m, n}, std::move(out), parts, [sizes](Node& nd) {
    std::size_t off = 0;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      if (auto* g = InGrad(nd, k))
        for (std::size_t i = 0; i < sizes[k]; ++i) (*g)[i] += nd.grad[off + i];
      off += sizes[k];
    }
  });
}

Tensor SliceRows(const Tensor& a, std::size_t begin, std::size_t end) {
  RequireRank2("slice_rows", a);
  if (begin >= end || end > a.rows()) {
    throw Error("slice_rows: range [" + std::to_string(begin) + ", " +
                std::to_string(end) + ") invalid for " + ShapeString(a.shape()));
  }
  const std::size_t n = a.cols();
  std::vector<double> out(a.values().begin() + begin * n, a.values().begin() + end * n);
  return MakeOp("slice_rows", {end - begin, n}, std::move(out), {a}, [begin, n](Node& nd) {
    if (auto* g = InGrad(nd, 0))
      for (std::size_t i = 0; i < nd.grad.size(); ++i) (*g)[begin * n + i] += nd.grad[i];
  });
}

Tensor SliceCols(const Tensor& a, std::size_t begin, std::size_t end) {
  RequireRank2("slice_cols", a);
  if (begin >= end || end > a.cols()) {
    throw Error("slice_cols: range [" + std::to_string(begin) + ", " +
                std::to_string(end) + ") invalid for " + ShapeString(a.shape()));
  }
  const std::size_t m = a.rows(), n = a.cols(), w = end - begin;
  std::vector<double> out(m * w);
  auto av = a.values();
  for (std::size_t i = 0; i < m; ++i)
    std::copy_n(av.begin() + i * n + begin, w, out.begin() + i * w);
  return MakeOp("slice_cols", {m, w}, std::move(out), {a}, [m, n, w, begin](Node& nd) {
    if (auto* g = InGrad(nd, 0))
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < w; ++j) (*g)[i * n + begin + j] += nd.grad[i * w + j];
  });
}

Tensor Reshape(const Tensor& a, Shape shape) {
  if (ShapeSize(shape) != a.size()) {
    throw Error("reshape: cannot view " + ShapeString(a.shape()) + " as " +
                ShapeString(shape));
  }
  std::vector<double> out(a.values().begin(), a.values().end());
  return MakeOp("reshape", std::move(shape), std::move(out), {a}, [](Node& nd) {
    if (auto* g = InGrad(nd, 0))
      for (std::size_t i = 0; i < nd.grad.size(); ++i) (*g)[i] += nd.grad[i];
  });
}

Tensor LayerNormRows(const Tensor& x, const Tensor& gain, const Tensor& bias,
                     double eps) {
  RequireRank2("layer_norm", x);
  const std::size_t m = x.rows(), n = x.cols();
  if (gain.size() != n || bias.size() != n) {
    throw Error("layer_norm: gain " + ShapeString(gain.shape()) + " / bias " +
                ShapeString(bias.shape()) + " do not match " + ShapeString(x.shape()));
  }
  std::vector<double> normed(m * n), inv_std(m), out(m * n);
  auto xv = x.values();
  auto gv = gain.values();
  auto bv = bias.values();
  for (std::size_t i = 0; i < m; ++i) {
    double mean = 0.0;
    for (std::size_t j = 0; j < n; ++j) mean += xv[i * n + j];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double d = xv[i * n + j] - mean;
      var += d * d;
    }
    var /= static_cast<double>(n);
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < n; ++j) {
      normed[i * n + j] = (xv[i * n + j] - mean) * inv_std[i];
      out[i * n + j] = normed[i * n + j] * gv[j] + bv[j];
    }
  }
  return MakeOp("layer_norm", x.shape(), std::move(out), {x, gain, bias},
                [m, n, normed = std::move(normed), inv_std = std::move(inv_std)](Node& nd) {
                  const auto& G = InValue(nd, 1);
                  auto* gx = InGrad(nd, 0);
                  auto* gg = InGrad(nd, 1);
                  auto* gb = InGrad(nd, 2);
                  std::vector<double> dy(n);
                  for (std::size_t i = 0; i < m; ++i) {
                    double mean_dy = 0.0, mean_dyy = 0.0;
                    for (std::size_t j = 0; j < n; ++j) {
                      const double go = nd.grad[i * n + j];
                      if (gg) (*gg)[j] += go * normed[i * n + j];
                      if (gb) (*gb)[j] += go;
                      dy[j] = go * G[j];
                      mean_dy += dy[j];
                      mean_dyy += dy[j] * normed[i * n + j];
                    }
                    if (!gx) continue;
                    mean_dy /= static_cast<double>(n);
                    mean_dyy /= static_cast<double>(n);
                    for (std::size_t j = 0; j < n; ++j) {
                      (*gx)[i * n + j] +=
                          inv_std[i] * (dy[j] - mean_dy - normed[i * n + j] * mean_dyy);
                    }
                  }
                });
}

Tensor Sum(const Tensor& a) {
  double s = 0.0;
  for (double v : a.values()) s += v;
  return MakeOp("sum", {1, 1}, {s}, {a}, [](Node& nd) {
    if (auto* g = InGrad(nd, 0))
      for (double& v : *g) v += nd.grad[0];
  });
}

Tensor Mean(const Tensor& a) { return Scale(Sum(a), 1.0 / static_cast<double>(a.size())); }

Tensor GatherRows(const Tensor& table, std::span<const int> ids) {
  RequireRank2("gather_rows", table);
  if (ids.empty()) throw Error("gather_rows: empty index list");
  const std::size_t n = table.cols(), rows = table.rows();
  std::vector<double> out(ids.size() * n);
  std::vector<int> idx(ids.begin(), ids.end());
  auto tv = table.values();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || static_cast<std::size_t>(idx[i]) >= rows) {
      throw Error("gather_rows: index " + std::to_string(idx[i]) +
                  " out of range for " + ShapeString(table.shape()));
    }
    std::copy_n(tv.begin() + idx[i] * n, n, out.begin() + i * n);
  }
  const std::size_t count = idx.size();
  return MakeOp("gather_rows", {count, n}, std::move(out), {table},
                [n, idx = std::move(idx)](Node& nd) {
                  if (auto* g = InGrad(nd, 0))
                    for (std::size_t i = 0; i < idx.size(); ++i)
                      for (std::size_t j = 0; j < n; ++j)
                        (*g)[idx[i] * n + j] += nd.grad[i * n + j];
                });
}

Tensor Pick(const Tensor& a, std::span<const int> ids) {
  RequireRank2("pick", a);
  const std::size_t m = a.rows(), n = a.cols();
  if (ids.size() != m) {
    throw Error("pick: " + std::to_string(ids.size()) + " indices for " +
                ShapeString(a.shape()));
  }
  std::vector<int> idx(ids.begin(), ids.end());
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (idx[i] < 0 || static_cast<std::size_t>(idx[i]) >= n) {
      throw Error("pick: index " + std::to_string(idx[i]) + " out of range for " +
                  ShapeString(a.shape()));
    }
    out[i] = a.values()[i * n + idx[i]];
  }
  return MakeOp("pick", {m, 1}, std::move(out), {a}, [n, idx = std::move(idx)](Node& nd) {
    if (auto* g = InGrad(nd, 0))
      for (std::size_t i = 0; i < idx.size(); ++i) (*g)[i * n + idx[i]] += nd.grad[i];
  });
}

Tensor TimeShift(const Tensor& a, int offset) {
  RequireRank2("time_shift", a);
  const std::size_t m = a.rows(), n = a.cols();
  std::vector<double> out(m * n, 0.0);
  auto av = a.values();
  for (std::size_t t = 0; t < m; ++t) {
    const long src = static_cast<long>(t) + offset;
    if (src < 0 || src >= static_cast<long>(m)) continue;
    std::copy_n(av.begin() + src * n, n, out.begin() + t * n);
  }
  return MakeOp("time_shift", a.shape(), std::move(out), {a}, [m, n, offset](Node& nd) {
    auto* g = InGrad(nd, 0);
    if (!g) return;
    for (std::size_t t = 0; t < m; ++t) {
      const long src = static_cast<long>(t) + offset;
      if (src < 0 || src >= static_cast<long>(m)) continue;
      for (std::size_t j = 0; j < n; ++j) (*g)[src * n + j] += nd.grad[t * n + j];
    }
  });
}

Tensor UnfoldTime(const Tensor& a, int first, int last) {
  RequireRank2("unfold_time", a);
  if (last < first) throw Error("unfold_time: empty offset range");
  const std::size_t m = a.rows(), n = a.cols();
  const std::size_t k = static_cast<std::size_t>(last - first + 1);
  std::vector<double> out(m * n * k, 0.0);
  auto av = a.values();
  for (std::size_t t = 0; t < m; ++t) {
    for (std::size_t s = 0; s < k; ++s) {
      const long src = static_cast<long>(t) + first + static_cast<long>(s);
      if (src < 0 || src >= static_cast<long>(m)) continue;
      std::copy_n(av.begin() + src * n, n, out.begin() + t * n * k + s * n);
    }
  }
  return MakeOp("unfold_time", {m, n * k}, std::move(out), {a}, [m, n, k, first](Node& nd) {
    auto* g = InGrad(nd, 0);
    if (!g) return;
    for (std::size_t t = 0; t < m; ++t) {
      for (std::size_t s = 0; s < k; ++s) {
        const long src = static_cast<long>(t) + first + static_cast<long>(s);
        if (src < 0 || src >= static_cast<long>(m)) continue;
        for (std::size_t j = 0; j < n; ++j)
          (*g)[src * n + j] += nd.grad[t * n * k + s * n + j];
      }
    }
  });
}

Tensor MaxPoolRows(const Tensor& a, std::size_t window) {
  RequireRank2("max_pool_rows", a);
  if (window == 0) throw Error("max_pool_rows: zero window");
  const std::size_t m = a.rows(), n = a.cols();
  const std::size_t out_rows = (m + window - 1) / window;
  std::vector<double> out(out_rows * n);
  std::vector<std::size_t> argmax(out_rows * n);
  auto av = a.values();
  for (std::size_t o = 0; o < out_rows; ++o) {
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t best = o * window;
      for (std::size_t r = o * window + 1; r < std::min(m, (o + 1) * window); ++r) {
        if (av[r * n + j] > av[best * n + j]) best = r;
      }
      argmax[o * n + j] = best * n + j;
      out[o * n + j] = av[best * n + j];
    }
  }
  return MakeOp("max_pool_rows", {out_rows, n}, std::move(out), {a},
                [argmax = std::move(argmax)](Node& nd) {
                  if (auto* g = InGrad(nd, 0))
                    for (std::size_t i = 0; i < argmax.size(); ++i)
                      (*g)[argmax[i]] += nd.grad[i];
                });
}

Tensor OuterAdd(const Tensor& a, const Tensor& b) {
  RequireRank2("outer_add", a);
  RequireRank2("outer_add", b);
  const std::size_t m = a.rows(), n = b.rows(), k = a.cols();
  if (b.cols() != k) {
    throw Error("outer_add: width mismatch " + ShapeString(a.shape()) + " vs " +
                ShapeString(b.shape()));
  }
  std::vector<double> out(m * n * k);
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t c = 0; c < k; ++c)
        out[(i * n + j) * k + c] = av[i * k + c] + bv[j * k + c];
  return MakeOp("outer_add", {m * n, k}, std::move(out), {a, b}, [m, n, k](Node& nd) {
    auto* ga = InGrad(nd, 0);
    auto* gb = InGrad(nd, 1);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t c = 0; c < k; ++c) {
          const double g = nd.grad[(i * n + j) * k + c];
          if (ga) (*ga)[i * k + c] += g;
          if (gb) (*gb)[j * k + c] += g;
        }
  });
}

}  // namespace asrlab
