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

#include "sawt/nn/layers.h"

#include <cmath>

#include "sawt/util/error.h"

namespace sawt::nn {

Parameter* ParamStore::Create(const std::string& name, Mat init) {
  if (index_.contains(name)) {
    throw NumericError("DuplicateParameter", name + " already exists");
  }
  items_.push_back(std::make_unique<Parameter>(name, std::move(init)));
  index_[name] = items_.back().get();
  return items_.back().get();
}

Parameter* ParamStore::Find(const std::string& name) const {
  const auto it = index_.find(name);
  return it == index_.end() ? nullptr : it->second;
}

void ParamStore::ZeroGrad() {
  for (auto& p : items_) p->ZeroGrad();
}

long ParamStore::TotalSize() const {
  long total = 0;
  for (const auto& p : items_) total += static_cast<long>(p->size());
  return total;
}

std::map<std::string, long> ParamStore::SizeBySubnet() const {
  std::map<std::string, long> by_net;
  for (const auto& p : items_) {
    const auto dot = p->name.find('.');
    by_net[p->name.substr(0, dot)] += static_cast<long>(p->size());
  }
  return by_net;
}

Mat XavierUniform(Eigen::Index rows, Eigen::Index cols, util::Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(-bound, bound);
  return m;
}

Mat NormalInit(Eigen::Index rows, Eigen::Index cols, double stddev,
               util::Rng& rng) {
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal(0.0, stddev);
  return m;
}

Linear::Linear(ParamStore& store, const std::string& name, Eigen::Index in,
               Eigen::Index out, util::Rng& rng) {
  util::Rng wr = rng.child(name + ".w");
  weight = store.Create(name + ".w", XavierUniform(in, out, wr));
  bias = store.Create(name + ".b", Mat::Zero(1, out));
}

Tensor Linear::Forward(Ctx& ctx, const Tensor& x) const {
  return RowBroadcastAdd(MatMul(x, ctx.graph.Param(*weight)),
                         ctx.graph.Param(*bias));
}

LayerNorm::LayerNorm(ParamStore& store, const std::string& name,
                     Eigen::Index dim) {
  gamma = store.Create(name + ".g", Mat::Ones(1, dim));
  beta = store.Create(name + ".b", Mat::Zero(1, dim));
}

Tensor LayerNorm::Forward(Ctx& ctx, const Tensor& x) const {
  return LayerNormRows(x, ctx.graph.Param(*gamma), ctx.graph.Param(*beta));
}

Embedding::Embedding(ParamStore& store, const std::string& name,
                     Eigen::Index vocab, Eigen::Index dim, util::Rng& rng) {
  util::Rng wr = rng.child(name + ".w");
  weight = store.Create(name + ".w",
                        NormalInit(vocab, dim, 1.0 / std::sqrt(dim), wr));
}

Tensor Embedding::Forward(Ctx& ctx, const std::vector<int>& ids) const {
  for (const int id : ids) {
    if (id < 0 || id >= weight->value.rows()) {
      throw DataError("InvalidId",
                      "token id " + std::to_string(id) + " out of range");
    }
  }
  return GatherRows(ctx.graph.Param(*weight), ids);
}

Conv1dLayer::Conv1dLayer(ParamStore& store, const std::string& name, int in_ch,
                         int out_ch, int kernel, int stride, int pad_left,
                         int pad_right, util::Rng& rng)
    : kernel(kernel), stride(stride), pad_left(pad_left), pad_right(pad_right) {
  util::Rng wr = rng.child(name + ".w");
  weight = store.Create(
      name + ".w",
      XavierUniform(static_cast<Eigen::Index>(kernel) * in_ch, out_ch, wr));
  bias = store.Create(name + ".b", Mat::Zero(1, out_ch));
}

Tensor Conv1dLayer::Forward(Ctx& ctx, const Tensor& x) const {
  return Conv1d(x, ctx.graph.Param(*weight), ctx.graph.Param(*bias), kernel,
                stride, pad_left, pad_right);
}

Mat CausalMask(Eigen::Index t) {
  Mat m = Mat::Zero(t, t);
  for (Eigen::Index i = 0; i < t; ++i) {
    for (Eigen::Index j = i + 1; j < t; ++j) m(i, j) = -1e30;
  }
  return m;
}

Mat KeyPaddingMask(Eigen::Index t_query, Eigen::Index t_key,
                   Eigen::Index valid_keys) {
  Mat m = Mat::Zero(t_query, t_key);
  for (Eigen::Index j = valid_keys; j < t_key; ++j) {
    m.col(j).setConstant(-1e30);
  }
  return m;
}

Mat SinusoidalPositions(Eigen::Index t, Eigen::Index dim) {
  Mat pe = Mat::Zero(t, dim);
  for (Eigen::Index pos = 0; pos < t; ++pos) {
    for (Eigen::Index i = 0; i < dim; i += 2) {
      const double angle =
          pos * std::exp(-std::log(10000.0) * static_cast<double>(i) / dim);
      pe(pos, i) = std::sin(angle);
      if (i + 1 < dim) pe(pos, i + 1) = std::cos(angle);
    }
  }
  return pe;
}

MultiHeadAttention::MultiHeadAttention(ParamStore& store,
                                       const std::string& name,
                                       Eigen::Index d_model, int n_heads,
                                       util::Rng& rng)
    : wq(store, name + ".q", d_model, d_model, rng),
      wk(store, name + ".k", d_model, d_model, rng),
      wv(store, name + ".v", d_model, d_model, rng),
      wo(store, name + ".o", d_model, d_model, rng),
      n_heads(n_heads),
      d_model(d_model) {
  if (d_model % n_heads != 0) {
    throw NumericError("ShapeMismatch", "d_model must divide by n_heads");
  }
}

Tensor MultiHeadAttention::Attend(Ctx& ctx, const Tensor& q, const Tensor& k,
                                  const Tensor& v, const Mat* add_mask) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(q.cols()));
  const Tensor scores = MulScalar(MatMul(q, Transpose(k)), scale);
  const Tensor probs = ctx.Drop(SoftmaxRows(scores, add_mask));
  return MatMul(probs, v);
}

Tensor MultiHeadAttention::Forward(Ctx& ctx, const Tensor& query_in,
                                   const Tensor& kv_in,
                                   const Mat* add_mask) const {
  const Tensor q = wq.Forward(ctx, query_in);
  const Tensor k = wk.Forward(ctx, kv_in);
  const Tensor v = wv.Forward(ctx, kv_in);
  const Eigen::Index dh = d_model / n_heads;
  std::vector<Tensor> heads;
  heads.reserve(n_heads);
  for (int h = 0; h < n_heads; ++h) {
    heads.push_back(Attend(ctx, SliceCols(q, h * dh, dh),
                           SliceCols(k, h * dh, dh), SliceCols(v, h * dh, dh),
                           add_mask));
  }
  return wo.Forward(ctx, n_heads == 1 ? heads[0] : HConcat(heads));
}

FeedForward::FeedForward(ParamStore& store, const std::string& name,
                         Eigen::Index d_model, Eigen::Index hidden,
                         util::Rng& rng)
    : in(store, name + ".in", d_model, hidden, rng),
      out(store, name + ".out", hidden, d_model, rng) {}

Tensor FeedForward::Forward(Ctx& ctx, const Tensor& x) const {
  return out.Forward(ctx, ctx.Drop(Gelu(in.Forward(ctx, x))));
}

EncoderLayer::EncoderLayer(ParamStore& store, const std::string& name,
                           Eigen::Index d_model, int n_heads, Eigen::Index ffn,
                           util::Rng& rng)
    : ln1(store, name + ".ln1", d_model),
      ln2(store, name + ".ln2", d_model),
      attn(store, name + ".attn", d_model, n_heads, rng),
      ffn(store, name + ".ffn", d_model, ffn, rng) {}

Tensor EncoderLayer::Forward(Ctx& ctx, const Tensor& x,
                             const Mat* add_mask) const {
  const Tensor normed = ln1.Forward(ctx, x);
  const Tensor h = Add(x, ctx.Drop(attn.Forward(ctx, normed, normed, add_mask)));
  return Add(h, ctx.Drop(ffn.Forward(ctx, ln2.Forward(ctx, h))));
}

DecoderLayer::DecoderLayer(ParamStore& store, const std::string& name,
                           Eigen::Index d_model, int n_heads, Eigen::Index ffn,
                           util::Rng& rng)
    : ln1(store, name + ".ln1", d_model),
      ln2(store, name + ".ln2", d_model),
      ln3(store, name + ".ln3", d_model),
      self_attn(store, name + ".self", d_model, n_heads, rng),
      cross_attn(store, name + ".cross", d_model, n_heads, rng),
      ffn(store, name + ".ffn", d_model, ffn, rng) {}

Tensor DecoderLayer::Forward(Ctx& ctx, const Tensor& x, const Tensor& memory,
                             const Mat* self_mask, const Mat* cross_mask) const {
  const Tensor n1 = ln1.Forward(ctx, x);
  const Tensor h1 =
      Add(x, ctx.Drop(self_attn.Forward(ctx, n1, n1, self_mask)));
  const Tensor h2 =
      Add(h1, ctx.Drop(cross_attn.Forward(ctx, ln2.Forward(ctx, h1), memory,
                                          cross_mask)));
  return Add(h2, ctx.Drop(ffn.Forward(ctx, ln3.Forward(ctx, h2))));
}

}  // namespace sawt::nn
