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

#ifndef SAWT_TASK_LM_H_
#define SAWT_TASK_LM_H_

#include <cstdint>
#include <string>
#include <vector>

#include "sawt/nn/adam.h"
#include "sawt/nn/layers.h"

namespace sawt::task {

struct CharLmConfig {
  int d_model = 64;
  int n_heads = 2;
  int layers = 2;
  int ffn_dim = 128;
  double dropout = 0.1;
  int vocab_size = 0;

  // Training defaults; the toy preset scales the schedule down.
  double lr = 5e-4;
  int warmup_updates = 4000;
  int max_updates = 300000;
  double beta1 = 0.9, beta2 = 0.98, eps = 1e-8;

  std::string ToJson() const;
  static CharLmConfig FromJson(const std::string& json_text);
  static CharLmConfig Toy(int vocab_size);
};

// Autoregressive character LM over the shared tokenizer: causal transformer
// with a zero-initialized output head (an untrained model scores uniformly).
class CharLM {
 public:
  CharLM(CharLmConfig config, std::uint64_t seed);

  const CharLmConfig& config() const { return config_; }
  nn::ParamStore& params() { return params_; }

  // Logits for each position of [bos] + ids[:-1] ... shaped |ids| x vocab:
  // row i predicts ids[i].
  nn::Tensor ForwardTeacher(nn::Ctx& ctx, const std::vector<int>& target_ids) const;

  // Log-probabilities of the next symbol after `prefix` (bos-anchored).
  Eigen::VectorXd NextLogProbs(const std::vector<int>& prefix) const;

  // One Adam step over a set of id sequences (bos/eos added internally);
  // returns the mean per-token cross-entropy.
  double TrainStep(const std::vector<std::vector<int>>& sequences);

  // exp(mean per-token NLL) including eos.
  double Perplexity(const std::vector<std::vector<int>>& sequences) const;

  void Save(const std::string& path) const;
  static CharLM Load(const std::string& path);

  int step_count() const { return optimizer_.step_count(); }

 private:
  CharLmConfig config_;
  nn::ParamStore params_;
  nn::Embedding embedding_;
  std::vector<nn::EncoderLayer> layers_;
  nn::LayerNorm norm_;
  nn::Linear head_;
  nn::AdamOptimizer optimizer_;
  util::Rng train_rng_;
};

}  // namespace sawt::task

#endif  // SAWT_TASK_LM_H_
