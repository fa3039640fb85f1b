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

#ifndef SAWT_NN_TENSOR_H_
#define SAWT_NN_TENSOR_H_

#include <deque>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sawt/util/rng.h"

namespace sawt::nn {

using Mat = Eigen::MatrixXd;

class Graph;

// Long-lived trainable array. Gradients accumulate across Graph::Backward
// calls until ZeroGrad.
struct Parameter {
  std::string name;
  Mat value;
  Mat grad;

  Parameter(std::string n, Mat v)
      : name(std::move(n)), value(std::move(v)) {
    grad = Mat::Zero(value.rows(), value.cols());
  }
  void ZeroGrad() { grad.setZero(); }
  Eigen::Index size() const { return value.size(); }
};

namespace detail {

struct Node {
  Mat value;
  Mat grad;  // allocated lazily; valid when grad_ready
  bool requires_grad = false;
  bool grad_ready = false;
  std::function<void()> backward;  // accumulates this node's grad into parents

  void AccumulateGrad(const Mat& g) {
    if (!grad_ready) {
      grad = Mat::Zero(value.rows(), value.cols());
      grad_ready = true;
    }
    grad += g;
  }
};

struct TensorAccess;  // op-internal access to the node behind a Tensor

}  // namespace detail

// Handle into a Graph-owned node. Cheap to copy; invalidated when the graph
// is destroyed or cleared.
class Tensor {
 public:
  Tensor() = default;

  bool defined() const { return node_ != nullptr; }
  const Mat& value() const { return node_->value; }
  const Mat& grad() const { return node_->grad; }
  bool has_grad() const { return node_->grad_ready; }
  Eigen::Index rows() const { return node_->value.rows(); }
  Eigen::Index cols() const { return node_->value.cols(); }
  double scalar() const { return node_->value(0, 0); }

 private:
  friend class Graph;
  friend struct detail::TensorAccess;
  explicit Tensor(detail::Node* node, Graph* graph)
      : node_(node), graph_(graph) {}
  detail::Node* node_ = nullptr;
  Graph* graph_ = nullptr;
};

// Dynamic computation tape. Nodes are created in forward order; Backward
// walks them in reverse, so every op's inputs are visited after all of the
// op's consumers.
class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Tensor Constant(Mat value);
  Tensor Leaf(Mat value, bool requires_grad);
  // Leaf aliasing a Parameter: after Backward, the node gradient is added
  // into Parameter::grad.
  Tensor Param(Parameter& p);

  // Generic node; `backward` runs with self->grad populated.
  Tensor Make(Mat value, const std::vector<Tensor>& parents,
              std::function<void(detail::Node* self,
                                 const std::vector<detail::Node*>& parents)>
                  backward);

  // Seeds d(loss)/d(loss) = 1 and propagates. `loss` must be 1x1.
  void Backward(const Tensor& loss);

  std::size_t size() const { return nodes_.size(); }

 private:
  friend class Tensor;
  std::deque<detail::Node> nodes_;
  std::vector<std::pair<detail::Node*, Parameter*>> param_leaves_;
};

namespace detail {

struct TensorAccess {
  static Node* node(const Tensor& t) { return t.node_; }
  static Graph* graph(const Tensor& t) { return t.graph_; }
};

}  // namespace detail

// ---- elementwise and arithmetic ----
Tensor Add(const Tensor& a, const Tensor& b);
Tensor Sub(const Tensor& a, const Tensor& b);
Tensor Mul(const Tensor& a, const Tensor& b);
Tensor Neg(const Tensor& a);
Tensor AddScalar(const Tensor& a, double c);
Tensor MulScalar(const Tensor& a, double c);
Tensor AddConst(const Tensor& a, const Mat& c);
Tensor MulConst(const Tensor& a, const Mat& c);
Tensor Gelu(const Tensor& a);
Tensor Tanh(const Tensor& a);
Tensor Sigmoid(const Tensor& a);
Tensor Exp(const Tensor& a);
Tensor Log(const Tensor& a);
Tensor Softplus(const Tensor& a);
Tensor Abs(const Tensor& a);
// x*log(x) with the 0*log(0)=0 convention (entropy terms).
Tensor XLogX(const Tensor& a);
Tensor Detach(const Tensor& a);

// ---- structure ----
Tensor MatMul(const Tensor& a, const Tensor& b);
Tensor Transpose(const Tensor& a);
Tensor RowBroadcastAdd(const Tensor& x, const Tensor& bias);  // bias 1xC
Tensor RowScale(const Tensor& x, const Eigen::VectorXd& s);   // constant s
Tensor SliceRows(const Tensor& x, Eigen::Index start, Eigen::Index len);
Tensor SliceCols(const Tensor& x, Eigen::Index start, Eigen::Index len);
Tensor GatherRows(const Tensor& x, const std::vector<int>& rows);
Tensor VConcat(const std::vector<Tensor>& parts);
Tensor HConcat(const std::vector<Tensor>& parts);
Tensor PickPerRow(const Tensor& x, const std::vector<int>& cols);  // Nx1

// ---- reductions ----
Tensor SumAll(const Tensor& x);   // 1x1
Tensor MeanAll(const Tensor& x);  // 1x1
Tensor SumOverRows(const Tensor& x);  // NxC -> 1xC
Tensor SumOverCols(const Tensor& x);  // NxC -> Nx1

// ---- normalization / attention ----
// Optional additive mask (same shape) is applied before the softmax; use
// large negative entries to disable positions.
Tensor SoftmaxRows(const Tensor& x, const Mat* add_mask = nullptr);
Tensor LogSoftmaxRows(const Tensor& x, const Mat* add_mask = nullptr);
Tensor LayerNormRows(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                     double eps = 1e-5);

// ---- convolution ----
// x is time x channels; weight is (kernel*in_ch) x out_ch with the kernel
// tap as the major index; output is floor((pl+T+pr-kernel)/stride)+1 rows.
Tensor Conv1d(const Tensor& x, const Tensor& weight, const Tensor& bias,
              int kernel, int stride, int pad_left, int pad_right);

// ---- training helpers ----
Tensor Dropout(const Tensor& x, double p, util::Rng& rng, bool train);

// Mean of -log_probs(i, target[i]); `log_probs` must already be
// log-softmaxed. Rows with target < 0 are excluded from the mean.
Tensor NllLoss(const Tensor& log_probs, const std::vector<int>& targets);

}  // namespace sawt::nn

#endif  // SAWT_NN_TENSOR_H_
