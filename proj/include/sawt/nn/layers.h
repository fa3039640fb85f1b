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

#ifndef SAWT_NN_LAYERS_H_
#define SAWT_NN_LAYERS_H_

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sawt/nn/tensor.h"
#include "sawt/util/rng.h"

namespace sawt::nn {

// Owns every Parameter of a model, addressable by hierarchical name.
class ParamStore {
 public:
  Parameter* Create(const std::string& name, Mat init);
  Parameter* Find(const std::string& name) const;  // nullptr when missing
  const std::vector<std::unique_ptr<Parameter>>& items() const {
    return items_;
  }
  void ZeroGrad();
  long TotalSize() const;
  // Parameter count grouped by the name segment before the first '.'.
  std::map<std::string, long> SizeBySubnet() const;

 private:
  std::vector<std::unique_ptr<Parameter>> items_;
  std::map<std::string, Parameter*> index_;
};

// Deterministic initializers; the rng is derived from the parameter name so
// init is independent of creation order.
Mat XavierUniform(Eigen::Index rows, Eigen::Index cols, util::Rng& rng);
Mat NormalInit(Eigen::Index rows, Eigen::Index cols, double stddev,
               util::Rng& rng);

// Forward-pass context: the graph being built plus train-time settings.
struct Ctx {
  Graph& graph;
  bool train = false;
  double dropout = 0.0;
  util::Rng* rng = nullptr;  // required when train && dropout > 0

  Tensor Drop(const Tensor& x) const {
    if (!train || dropout <= 0.0) return x;
    return nn::Dropout(x, dropout, *rng, true);
  }
};

class Linear {
 public:
  Linear() = default;
  Linear(ParamStore& store, const std::string& name, Eigen::Index in,
         Eigen::Index out, util::Rng& rng);
  Tensor Forward(Ctx& ctx, const Tensor& x) const;

  Parameter* weight = nullptr;  // in x out
  Parameter* bias = nullptr;    // 1 x out
};

class LayerNorm {
 public:
  LayerNorm() = default;
  LayerNorm(ParamStore& store, const std::string& name, Eigen::Index dim);
  Tensor Forward(Ctx& ctx, const Tensor& x) const;

  Parameter* gamma = nullptr;
  Parameter* beta = nullptr;
};

class Embedding {
 public:
  Embedding() = default;
  Embedding(ParamStore& store, const std::string& name, Eigen::Index vocab,
            Eigen::Index dim, util::Rng& rng);
  Tensor Forward(Ctx& ctx, const std::vector<int>& ids) const;

  Parameter* weight = nullptr;  // vocab x dim
};

class Conv1dLayer {
 public:
  Conv1dLayer() = default;
  Conv1dLayer(ParamStore& store, const std::string& name, int in_ch,
              int out_ch, int kernel, int stride, int pad_left, int pad_right,
              util::Rng& rng);
  Tensor Forward(Ctx& ctx, const Tensor& x) const;

  Parameter* weight = nullptr;
  Parameter* bias = nullptr;
  int kernel = 1, stride = 1, pad_left = 0, pad_right = 0;
};

// Additive attention masks (-1e30 disables a key).
Mat CausalMask(Eigen::Index t);
Mat KeyPaddingMask(Eigen::Index t_query, Eigen::Index t_key,
                   Eigen::Index valid_keys);

// Sinusoidal absolute positions, shared across modalities.
Mat SinusoidalPositions(Eigen::Index t, Eigen::Index dim);

class MultiHeadAttention {
 public:
  MultiHeadAttention() = default;
  MultiHeadAttention(ParamStore& store, const std::string& name,
                     Eigen::Index d_model, int n_heads, util::Rng& rng);

  // Core scaled-dot-product attention for one head.
  static Tensor Attend(Ctx& ctx, const Tensor& q, const Tensor& k,
                       const Tensor& v, const Mat* add_mask);

  Tensor Forward(Ctx& ctx, const Tensor& query_in, const Tensor& kv_in,
                 const Mat* add_mask) const;

  Linear wq, wk, wv, wo;
  int n_heads = 1;
  Eigen::Index d_model = 0;
};

class FeedForward {
 public:
  FeedForward() = default;
  FeedForward(ParamStore& store, const std::string& name, Eigen::Index d_model,
              Eigen::Index hidden, util::Rng& rng);
  Tensor Forward(Ctx& ctx, const Tensor& x) const;

  Linear in, out;
};

// Pre-norm transformer encoder layer.
class EncoderLayer {
 public:
  EncoderLayer() = default;
  EncoderLayer(ParamStore& store, const std::string& name,
               Eigen::Index d_model, int n_heads, Eigen::Index ffn,
               util::Rng& rng);
  Tensor Forward(Ctx& ctx, const Tensor& x, const Mat* add_mask) const;

  LayerNorm ln1, ln2;
  MultiHeadAttention attn;
  FeedForward ffn;
};

// Pre-norm transformer decoder layer (causal self-attention + cross).
class DecoderLayer {
 public:
  DecoderLayer() = default;
  DecoderLayer(ParamStore& store, const std::string& name,
               Eigen::Index d_model, int n_heads, Eigen::Index ffn,
               util::Rng& rng);
  Tensor Forward(Ctx& ctx, const Tensor& x, const Tensor& memory,
                 const Mat* self_mask, const Mat* cross_mask) const;

  LayerNorm ln1, ln2, ln3;
  MultiHeadAttention self_attn, cross_attn;
  FeedForward ffn;
};

}  // namespace sawt::nn

#endif  // SAWT_NN_LAYERS_H_
