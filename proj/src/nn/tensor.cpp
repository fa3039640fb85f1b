// Copyright 2026 the sawt authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sawt/nn/tensor.h"

#include <cmath>

#include "sawt/util/error.h"

namespace sawt::nn {

using detail::Node;
using detail::TensorAccess;

namespace {

Graph* GraphOf(const Tensor& t) { return TensorAccess::graph(t); }

void CheckSameShape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw NumericError("ShapeMismatch",
                       std::string(op) + ": " + std::to_string(a.rows()) + "x" +
                           std::to_string(a.cols()) + " vs " +
                           std::to_string(b.rows()) + "x" +
                           std::to_string(b.cols()));
  }
}

template <typename F, typename DF>
Tensor UnaryEwise(const Tensor& a, F f, DF dfdx) {
  return GraphOf(a)->Make(
      a.value().unaryExpr(f), {a},
      [dfdx](Node* self, const std::vector<Node*>& p) {
        if (!p[0]->requires_grad) return;
        p[0]->AccumulateGrad(
            self->grad.cwiseProduct(p[0]->value.unaryExpr(dfdx)));
      });
}

}  // namespace

// --- Graph ------------------------------------------------------------

Tensor Graph::Constant(Mat value) { return Leaf(std::move(value), false); }

Tensor Graph::Leaf(Mat value, bool requires_grad) {
  nodes_.emplace_back();
  Node& n = nodes_.back();
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  return Tensor(&n, this);
}

Tensor Graph::Param(Parameter& p) {
  Tensor t = Leaf(p.value, true);
  param_leaves_.emplace_back(t.node_, &p);
  return t;
}

Tensor Graph::Make(
    Mat value, const std::vector<Tensor>& parents,
    std::function<void(Node* self, const std::vector<Node*>& parents)>
        backward) {
  nodes_.emplace_back();
  Node& n = nodes_.back();
  n.value = std::move(value);
  std::vector<Node*> parent_nodes;
  parent_nodes.reserve(parents.size());
  for (const auto& p : parents) {
    if (p.graph_ != this) {
      throw NumericError("GraphMismatch", "tensor belongs to another graph");
    }
    parent_nodes.push_back(p.node_);
    n.requires_grad = n.requires_grad || p.node_->requires_grad;
  }
  if (n.requires_grad && backward) {
    Node* self = &n;
    n.backward = [self, parent_nodes = std::move(parent_nodes),
                  backward = std::move(backward)] {
      backward(self, parent_nodes);
    };
  }
  return Tensor(&n, this);
}

void Graph::Backward(const Tensor& loss) {
  if (loss.rows() != 1 || loss.cols() != 1) {
    throw NumericError("ShapeMismatch", "backward target must be 1x1");
  }
  loss.node_->AccumulateGrad(Mat::Ones(1, 1));
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    if (it->grad_ready && it->requires_grad && it->backward) it->backward();
  }
  for (auto& [node, param] : param_leaves_) {
    if (node->grad_ready) param->grad += node->grad;
  }
}

// --- elementwise -------------------------------------------------------

Tensor Add(const Tensor& a, const Tensor& b) {
  CheckSameShape(a, b, "Add");
  return GraphOf(a)->Make(a.value() + b.value(), {a, b},
                          [](Node* self, const std::vector<Node*>& p) {
                            if (p[0]->requires_grad) p[0]->AccumulateGrad(self->grad);
                            if (p[1]->requires_grad) p[1]->AccumulateGrad(self->grad);
                          });
}

Tensor Sub(const Tensor& a, const Tensor& b) {
  CheckSameShape(a, b, "Sub");
  return GraphOf(a)->Make(a.value() - b.value(), {a, b},
                          [](Node* self, const std::vector<Node*>& p) {
                            if (p[0]->requires_grad) p[0]->AccumulateGrad(self->grad);
                            if (p[1]->requires_grad) p[1]->AccumulateGrad(-self->grad);
                          });
}

Tensor Mul(const Tensor& a, const Tensor& b) {
  CheckSameShape(a, b, "Mul");
  return GraphOf(a)->Make(
      a.value().cwiseProduct(b.value()), {a, b},
      [](Node* self, const std::vector<Node*>& p) {
        if (p[0]->requires_grad)
          p[0]->AccumulateGrad(self->grad.cwiseProduct(p[1]->value));
        if (p[1]->requires_grad)
          p[1]->AccumulateGrad(self->grad.cwiseProduct(p[0]->value));
      });
}

Tensor Neg(const Tensor& a) {
  return GraphOf(a)->Make(-a.value(), {a},
                          [](Node* self, const std::vector<Node*>& p) {
                            if (p[0]->requires_grad) p[0]->AccumulateGrad(-self->grad);
                          });
}

Tensor AddScalar(const Tensor& a, double c) {
  return GraphOf(a)->Make(a.value().array() + c, {a},
                          [](Node* self, const std::vector<Node*>& p) {
                            if (p[0]->requires_grad) p[0]->AccumulateGrad(self->grad);
                          });
}

Tensor MulScalar(const Tensor& a, double c) {
  return GraphOf(a)->Make(a.value() * c, {a},
                          [c](Node* self, const std::vector<Node*>& p) {
                            if (p[0]->requires_grad)
                              p[0]->AccumulateGrad(self->grad * c);
                          });
}

Tensor AddConst(const Tensor& a, const Mat& c) {
  if (a.rows() != c.rows() || a.cols() != c.cols()) {
    throw NumericError("ShapeMismatch", "AddConst shape mismatch");
  }
  return GraphOf(a)->Make(a.value() + c, {a},
                          [](Node* self, const std::vector<Node*>& p) {
                            if (p[0]->requires_grad) p[0]->AccumulateGrad(self->grad);
                          });
}

Tensor MulConst(const Tensor& a, const Mat& c) {
  if (a.rows() != c.rows() || a.cols() != c.cols()) {
    throw NumericError("ShapeMismatch", "MulConst shape mismatch");
  }
  return GraphOf(a)->Make(a.value().cwiseProduct(c), {a},
                          [c](Node* self, const std::vector<Node*>& p) {
                            if (p[0]->requires_grad)
                              p[0]->AccumulateGrad(self->grad.cwiseProduct(c));
                          });
}

Tensor Gelu(const Tensor& a) {
  constexpr double kInvSqrt2 = 0.7071067811865475244;
  constexpr double kInvSqrt2Pi = 0.3989422804014326779;
  return UnaryEwise(
      a,
      [](double x) { return 0.5 * x * (1.0 + std::erf(x * kInvSqrt2)); },
      [](double x) {
        const double cdf = 0.5 * (1.0 + std::erf(x * kInvSqrt2));
        const double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
        return cdf + x * pdf;
      });
}

Tensor Tanh(const Tensor& a) {
  return UnaryEwise(
      a, [](double x) { return std::tanh(x); },
      [](double x) {
        const double t = std::tanh(x);
        return 1.0 - t * t;
      });
}

Tensor Sigmoid(const Tensor& a) {
  return UnaryEwise(
      a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
      [](double x) {
        const double s = 1.0 / (1.0 + std::exp(-x));
        return s * (1.0 - s);
      });
}

Tensor Exp(const Tensor& a) {
  return UnaryEwise(a, [](double x) { return std::exp(x); },
                    [](double x) { return std::exp(x); });
}

Tensor Log(const Tensor& a) {
  return UnaryEwise(a, [](double x) { return std::log(x); },
                    [](double x) { return 1.0 / x; });
}

Tensor Softplus(const Tensor& a) {
  return UnaryEwise(
      a,
      [](double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); },
      [](double x) { return 1.0 / (1.0 + std::exp(-x)); });
}

Tensor Abs(const Tensor& a) {
  return UnaryEwise(a, [](double x) { return std::abs(x); },
                    [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

Tensor XLogX(const Tensor& a) {
  return UnaryEwise(
      a, [](double x) { return x > 0.0 ? x * std::log(x) : 0.0; },
      [](double x) { return x > 0.0 ? std::log(x) + 1.0 : 0.0; });
}

Tensor Detach(const Tensor& a) { return GraphOf(a)->Constant(a.value()); }

// --- structure -----------------------------------------------------------

Tensor MatMul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) {
    throw NumericError("ShapeMismatch",
                       "MatMul: " + std::to_string(a.cols()) +
                           " inner vs " + std::to_string(b.rows()));
  }
  return GraphOf(a)->Make(
      a.value() * b.value(), {a, b},
      [](Node* self, const std::vector<Node*>& p) {
        if (p[0]->requires_grad)
          p[0]->AccumulateGrad(self->grad * p[1]->value.transpose());
        if (p[1]->requires_grad)
          p[1]->AccumulateGrad(p[0]->value.transpose() * self->grad);
      });
}

Tensor Transpose(const Tensor& a) {
  return GraphOf(a)->Make(a.value().transpose(), {a},
                          [](Node* self, const std::vector<Node*>& p) {
                            if (p[0]->requires_grad)
                              p[0]->AccumulateGrad(self->grad.transpose());
                          });
}

Tensor RowBroadcastAdd(const Tensor& x, const Tensor& bias) {
  if (bias.rows() != 1 || bias.cols() != x.cols()) {
    throw NumericError("ShapeMismatch", "RowBroadcastAdd: bias must be 1xC");
  }
  Mat value = x.value();
  value.rowwise() += bias.value().row(0);
  return GraphOf(x)->Make(
      std::move(value), {x, bias},
      [](Node* self, const std::vector<Node*>& p) {
        if (p[0]->requires_grad) p[0]->AccumulateGrad(self->grad);
        if (p[1]->requires_grad)
          p[1]->AccumulateGrad(self->grad.colwise().sum());
      });
}

Tensor RowScale(const Tensor& x, const Eigen::VectorXd& s) {
  if (s.size() != x.rows()) {
    throw NumericError("ShapeMismatch", "RowScale: scale length != rows");
  }
  return GraphOf(x)->Make(s.asDiagonal() * x.value(), {x},
                          [s](Node* self, const std::vector<Node*>& p) {
                            if (p[0]->requires_grad)
                              p[0]->AccumulateGrad(s.asDiagonal() * self->grad);
                          });
}

Tensor SliceRows(const Tensor& x, Eigen::Index start, Eigen::Index len) {
  if (start < 0 || start + len > x.rows()) {
    throw NumericError("ShapeMismatch", "SliceRows out of range");
  }
  return GraphOf(x)->Make(
      x.value().middleRows(start, len), {x},
      [start, len](Node* self, const std::vector<Node*>& p) {
        if (!p[0]->requires_grad) return;
        Mat g = Mat::Zero(p[0]->value.rows(), p[0]->value.cols());
        g.middleRows(start, len) = self->grad;
        p[0]->AccumulateGrad(g);
      });
}

Tensor SliceCols(const Tensor& x, Eigen::Index start, Eigen::Index len) {
  if (start < 0 || start + len > x.cols()) {
    throw NumericError("ShapeMismatch", "SliceCols out of range");
  }
  return GraphOf(x)->Make(
      x.value().middleCols(start, len), {x},
      [start, len](Node* self, const std::vector<Node*>& p) {
        if (!p[0]->requires_grad) return;
        Mat g = Mat::Zero(p[0]->value.rows(), p[0]->value.cols());
        g.middleCols(start, len) = self->grad;
        p[0]->AccumulateGrad(g);
      });
}

Tensor GatherRows(const Tensor& x, const std::vector<int>& rows) {
  Mat value(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= x.rows()) {
      throw NumericError("ShapeMismatch", "GatherRows index out of range");
    }
    value.row(static_cast<Eigen::Index>(i)) = x.value().row(rows[i]);
  }
  return GraphOf(x)->Make(
      std::move(value), {x},
      [rows](Node* self, const std::vector<Node*>& p) {
        if (!p[0]->requires_grad) return;
        Mat g = Mat::Zero(p[0]->value.rows(), p[0]->value.cols());
        for (std::size_t i = 0; i < rows.size(); ++i) {
          g.row(rows[i]) += self->grad.row(static_cast<Eigen::Index>(i));
        }
        p[0]->AccumulateGrad(g);
      });
}

Tensor VConcat(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw NumericError("ShapeMismatch", "VConcat of nothing");
  Eigen::Index rows = 0;
  const Eigen::Index cols = parts[0].cols();
  for (const auto& p : parts) {
    if (p.cols() != cols) throw NumericError("ShapeMismatch", "VConcat cols differ");
    rows += p.rows();
  }
  Mat value(rows, cols);
  Eigen::Index off = 0;
  for (const auto& p : parts) {
    value.middleRows(off, p.rows()) = p.value();
    off += p.rows();
  }
  return GraphOf(parts[0])->Make(
      std::move(value), parts,
      [](Node* self, const std::vector<Node*>& p) {
        Eigen::Index off = 0;
        for (Node* parent : p) {
          const Eigen::Index r = parent->value.rows();
          if (parent->requires_grad) {
            parent->AccumulateGrad(self->grad.middleRows(off, r));
          }
          off += r;
        }
      });
}

Tensor HConcat(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw NumericError("ShapeMismatch", "HConcat of nothing");
  Eigen::Index cols = 0;
  const Eigen::Index rows = parts[0].rows();
  for (const auto& p : parts) {
    if (p.rows() != rows) throw NumericError("ShapeMismatch", "HConcat rows differ");
    cols += p.cols();
  }
  Mat value(rows, cols);
  Eigen::Index off = 0;
  for (const auto& p : parts) {
    value.middleCols(off, p.cols()) = p.value();
    off += p.cols();
  }
  return GraphOf(parts[0])->Make(
      std::move(value), parts,
      [](Node* self, const std::vector<Node*>& p) {
        Eigen::Index off = 0;
        for (Node* parent : p) {
          const Eigen::Index c = parent->value.cols();
          if (parent->requires_grad) {
            parent->AccumulateGrad(self->grad.middleCols(off, c));
          }
          off += c;
        }
      });
}

Tensor PickPerRow(const Tensor& x, const std::vector<int>& cols) {
  if (static_cast<Eigen::Index>(cols.size()) != x.rows()) {
    throw NumericError("ShapeMismatch", "PickPerRow needs one column per row");
  }
  Mat value(x.rows(), 1);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (cols[i] < 0 || cols[i] >= x.cols()) {
      throw NumericError("ShapeMismatch", "PickPerRow column out of range");
    }
    value(i, 0) = x.value()(i, cols[i]);
  }
  return GraphOf(x)->Make(
      std::move(value), {x},
      [cols](Node* self, const std::vector<Node*>& p) {
        if (!p[0]->requires_grad) return;
        Mat g = Mat::Zero(p[0]->value.rows(), p[0]->value.cols());
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
          g(i, cols[i]) = self->grad(i, 0);
        }
        p[0]->AccumulateGrad(g);
      });
}

// --- reductions ------------------------------------------------------------

Tensor SumAll(const Tensor& x) {
  Mat value(1, 1);
  value(0, 0) = x.value().sum();
  return GraphOf(x)->Make(
      std::move(value), {x},
      [](Node* self, const std::vector<Node*>& p) {
        if (!p[0]->requires_grad) return;
        p[0]->AccumulateGrad(Mat::Constant(p[0]->value.rows(),
                                           p[0]->value.cols(),
                                           self->grad(0, 0)));
      });
}

Tensor MeanAll(const Tensor& x) {
  const double n = static_cast<double>(x.rows() * x.cols());
  Mat value(1, 1);
  value(0, 0) = x.value().sum() / n;
  return GraphOf(x)->Make(
      std::move(value), {x},
      [n](Node* self, const std::vector<Node*>& p) {
        if (!p[0]->requires_grad) return;
        p[0]->AccumulateGrad(Mat::Constant(p[0]->value.rows(),
                                           p[0]->value.cols(),
                                           self->grad(0, 0) / n));
      });
}

Tensor SumOverRows(const Tensor& x) {
  return GraphOf(x)->Make(
      x.value().colwise().sum(), {x},
      [](Node* self, const std::vector<Node*>& p) {
        if (!p[0]->requires_grad) return;
        p[0]->AccumulateGrad(self->grad.replicate(p[0]->value.rows(), 1));
      });
}

Tensor SumOverCols(const Tensor& x) {
  return GraphOf(x)->Make(
      x.value().rowwise().sum(), {x},
      [](Node* self, const std::vector<Node*>& p) {
        if (!p[0]->requires_grad) return;
        p[0]->AccumulateGrad(self->grad.replicate(1, p[0]->value.cols()));
      });
}

// --- softmax / layernorm -----------------------------------------------------

namespace {

Mat MaskedInput(const Tensor& x, const Mat* add_mask) {
  if (add_mask == nullptr) return x.value();
  if (add_mask->rows() != x.rows() || add_mask->cols() != x.cols()) {
    throw NumericError("ShapeMismatch", "softmax mask shape mismatch");
  }
  return x.value() + *add_mask;
}

Mat RowSoftmax(const Mat& z) {
  Mat s(z.rows(), z.cols());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double m = z.row(i).maxCoeff();
    s.row(i) = (z.row(i).array() - m).exp();
    s.row(i) /= s.row(i).sum();
  }
  return s;
}

}  // namespace

Tensor SoftmaxRows(const Tensor& x, const Mat* add_mask) {
  Mat s = RowSoftmax(MaskedInput(x, add_mask));
  return GraphOf(x)->Make(
      std::move(s), {x},
      [](Node* self, const std::vector<Node*>& p) {
        if (!p[0]->requires_grad) return;
        const Mat& s = self->value;
        Mat gs = self->grad.cwiseProduct(s);
        const Eigen::VectorXd dot = gs.rowwise().sum();
        Mat dx = gs - s.cwiseProduct(dot.replicate(1, s.cols()));
        p[0]->AccumulateGrad(dx);
      });
}

Tensor LogSoftmaxRows(const Tensor& x, const Mat* add_mask) {
  const Mat z = MaskedInput(x, add_mask);
  Mat value(z.rows(), z.cols());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double m = z.row(i).maxCoeff();
    const double lse = m + std::log((z.row(i).array() - m).exp().sum());
    value.row(i) = z.row(i).array() - lse;
  }
  return GraphOf(x)->Make(
      std::move(value), {x},
      [](Node* self, const std::vector<Node*>& p) {
        if (!p[0]->requires_grad) return;
        const Mat s = self->value.array().exp();
        const Eigen::VectorXd gsum = self->grad.rowwise().sum();
        Mat dx = self->grad - s.cwiseProduct(gsum.replicate(1, s.cols()));
        p[0]->AccumulateGrad(dx);
      });
}

Tensor LayerNormRows(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                     double eps) {
  if (gamma.rows() != 1 || gamma.cols() != x.cols() || beta.rows() != 1 ||
      beta.cols() != x.cols()) {
    throw NumericError("ShapeMismatch", "LayerNormRows: gamma/beta must be 1xC");
  }
  const Eigen::Index n = x.rows(), c = x.cols();
  Mat xhat(n, c);
  Eigen::VectorXd inv_std(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mu = x.value().row(i).mean();
    const double var =
        (x.value().row(i).array() - mu).square().sum() / static_cast<double>(c);
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    xhat.row(i) = (x.value().row(i).array() - mu) * inv_std[i];
  }
  Mat value = xhat;
  for (Eigen::Index i = 0; i < n; ++i) {
    value.row(i) =
        value.row(i).cwiseProduct(gamma.value().row(0)) + beta.value().row(0);
  }
  return GraphOf(x)->Make(
      std::move(value), {x, gamma, beta},
      [xhat, inv_std](Node* self, const std::vector<Node*>& p) {
        Node* xn = p[0];
        Node* gn = p[1];
        Node* bn = p[2];
        const Eigen::Index n = xhat.rows(), c = xhat.cols();
        if (gn->requires_grad) {
          gn->AccumulateGrad(self->grad.cwiseProduct(xhat).colwise().sum());
        }
        if (bn->requires_grad) {
          bn->AccumulateGrad(self->grad.colwise().sum());
        }
        if (!xn->requires_grad) return;
        Mat dx(n, c);
        const double dc = static_cast<double>(c);
        for (Eigen::Index i = 0; i < n; ++i) {
          const Eigen::RowVectorXd dxhat =
              self->grad.row(i).cwiseProduct(gn->value.row(0));
          const double mean_dxhat = dxhat.mean();
          const double mean_dxhat_xhat =
              dxhat.cwiseProduct(xhat.row(i)).sum() / dc;
          dx.row(i) = inv_std[i] *
                      (dxhat.array() - mean_dxhat -
                       xhat.row(i).array() * mean_dxhat_xhat);
        }
        xn->AccumulateGrad(dx);
      });
}

// --- convolution -------------------------------------------------------

Tensor Conv1d(const Tensor& x, const Tensor& weight, const Tensor& bias,
              int kernel, int stride, int pad_left, int pad_right) {
  const Eigen::Index t_in = x.rows();
  const Eigen::Index c_in = x.cols();
  const Eigen::Index c_out = weight.cols();
  if (weight.rows() != kernel * c_in) {
    throw NumericError("ShapeMismatch", "Conv1d: weight rows != kernel*in_ch");
  }
  if (bias.rows() != 1 || bias.cols() != c_out) {
    throw NumericError("ShapeMismatch", "Conv1d: bias must be 1 x out_ch");
  }
  const Eigen::Index t_pad = pad_left + t_in + pad_right;
  if (t_pad < kernel) {
    throw NumericError("ShapeMismatch", "Conv1d: input shorter than kernel");
  }
  const Eigen::Index t_out = (t_pad - kernel) / stride + 1;

  Mat padded = Mat::Zero(t_pad, c_in);
  padded.middleRows(pad_left, t_in) = x.value();
  Mat unfolded(t_out, kernel * c_in);
  for (Eigen::Index t = 0; t < t_out; ++t) {
    for (int j = 0; j < kernel; ++j) {
      unfolded.block(t, j * c_in, 1, c_in) = padded.row(t * stride + j);
    }
  }
  Mat value = unfolded * weight.value();
  value.rowwise() += bias.value().row(0);

  return GraphOf(x)->Make(
      std::move(value), {x, weight, bias},
      [unfolded, kernel, stride, pad_left, t_pad](
          Node* self, const std::vector<Node*>& p) {
        Node* xn = p[0];
        Node* wn = p[1];
        Node* bn = p[2];
        if (bn->requires_grad) bn->AccumulateGrad(self->grad.colwise().sum());
        if (wn->requires_grad) {
          wn->AccumulateGrad(unfolded.transpose() * self->grad);
        }
        if (!xn->requires_grad) return;
        const Eigen::Index t_in = xn->value.rows();
        const Eigen::Index c_in = xn->value.cols();
        const Mat d_unfolded = self->grad * wn->value.transpose();
        Mat d_padded = Mat::Zero(t_pad, c_in);
        for (Eigen::Index t = 0; t < d_unfolded.rows(); ++t) {
          for (int j = 0; j < kernel; ++j) {
            d_padded.row(t * stride + j) +=
                d_unfolded.block(t, j * c_in, 1, c_in);
          }
        }
        xn->AccumulateGrad(d_padded.middleRows(pad_left, t_in));
      });
}

// --- training helpers -----------------------------------------------------

Tensor Dropout(const Tensor& x, double p, util::Rng& rng, bool train) {
  if (!train || p <= 0.0) return x;
  const double keep = 1.0 - p;
  Mat mask(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < mask.rows(); ++i) {
    for (Eigen::Index j = 0; j < mask.cols(); ++j) {
      mask(i, j) = rng.bernoulli(keep) ? 1.0 / keep : 0.0;
    }
  }
  return MulConst(x, mask);
}

Tensor NllLoss(const Tensor& log_probs, const std::vector<int>& targets) {
  if (static_cast<Eigen::Index>(targets.size()) != log_probs.rows()) {
    throw NumericError("ShapeMismatch", "NllLoss: one target per row required");
  }
  int count = 0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < log_probs.rows(); ++i) {
    if (targets[i] < 0) continue;
    if (targets[i] >= log_probs.cols()) {
      throw NumericError("ShapeMismatch", "NllLoss: target out of range");
    }
    total -= log_probs.value()(i, targets[i]);
    ++count;
  }
  Mat value(1, 1);
  value(0, 0) = count > 0 ? total / count : 0.0;
  return GraphOf(log_probs)
      ->Make(std::move(value), {log_probs},
             [targets, count](Node* self, const std::vector<Node*>& p) {
               if (!p[0]->requires_grad || count == 0) return;
               Mat g = Mat::Zero(p[0]->value.rows(), p[0]->value.cols());
               const double scale = self->grad(0, 0) / count;
               for (Eigen::Index i = 0; i < g.rows(); ++i) {
                 if (targets[i] >= 0) g(i, targets[i]) = -scale;
               }
               p[0]->AccumulateGrad(g);
             });
}

}  // namespace sawt::nn
