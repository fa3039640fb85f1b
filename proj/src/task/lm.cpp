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

#include "sawt/task/lm.h"

#include <cmath>

#include <nlohmann/json.hpp>

#include "sawt/model/checkpoint.h"
#include "sawt/text/tokenizer.h"
#include "sawt/util/error.h"

namespace sawt::task {

using nn::Ctx;
using nn::Mat;
using nn::Tensor;
using nlohmann::json;

std::string CharLmConfig::ToJson() const {
  json j;
  j["d_model"] = d_model;
  j["n_heads"] = n_heads;
  j["layers"] = layers;
  j["ffn_dim"] = ffn_dim;
  j["dropout"] = dropout;
  j["vocab_size"] = vocab_size;
  j["lr"] = lr;
  j["warmup_updates"] = warmup_updates;
  j["max_updates"] = max_updates;
  return j.dump();
}

CharLmConfig CharLmConfig::FromJson(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw DataError("ParseError", std::string("lm config: ") + e.what());
  }
  CharLmConfig c;
  c.d_model = j.value("d_model", c.d_model);
  c.n_heads = j.value("n_heads", c.n_heads);
  c.layers = j.value("layers", c.layers);
  c.ffn_dim = j.value("ffn_dim", c.ffn_dim);
  c.dropout = j.value("dropout", c.dropout);
  c.vocab_size = j.value("vocab_size", c.vocab_size);
  c.lr = j.value("lr", c.lr);
  c.warmup_updates = j.value("warmup_updates", c.warmup_updates);
  c.max_updates = j.value("max_updates", c.max_updates);
  return c;
}

CharLmConfig CharLmConfig::Toy(int vocab_size) {
  CharLmConfig c;
  c.d_model = 32;
  c.n_heads = 2;
  c.layers = 2;
  c.ffn_dim = 64;
  c.dropout = 0.0;
  c.vocab_size = vocab_size;
  c.lr = 1e-3;
  c.warmup_updates = 50;
  return c;
}

namespace {

nn::AdamConfig LmAdamConfig(const CharLmConfig& c) {
  nn::AdamConfig a;
  a.lr = c.lr;
  a.beta1 = c.beta1;
  a.beta2 = c.beta2;
  a.eps = c.eps;
  a.warmup_updates = c.warmup_updates;
  a.clip_norm = 5.0;
  return a;
}

}  // namespace

CharLM::CharLM(CharLmConfig config, std::uint64_t seed)
    : config_(config), train_rng_(util::Rng(seed).child("lm_train")) {
  if (config_.vocab_size < 1) {
    throw DataError("InvalidConfig", "LM vocab_size must be set");
  }
  util::Rng rng(seed);
  embedding_ = nn::Embedding(params_, "lm.embed", config_.vocab_size,
                             config_.d_model, rng);
  for (int i = 0; i < config_.layers; ++i) {
    layers_.emplace_back(params_, "lm.layer" + std::to_string(i),
                         config_.d_model, config_.n_heads, config_.ffn_dim, rng);
  }
  norm_ = nn::LayerNorm(params_, "lm.norm", config_.d_model);
  // Zero-initialized head: the untrained model scores every symbol equally
  // (perplexity == vocab size).
  head_.weight = params_.Create("lm.head.w",
                                Mat::Zero(config_.d_model, config_.vocab_size));
  head_.bias = params_.Create("lm.head.b", Mat::Zero(1, config_.vocab_size));
  optimizer_ = nn::AdamOptimizer(params_, LmAdamConfig(config_));
}

Tensor CharLM::ForwardTeacher(Ctx& ctx, const std::vector<int>& target_ids) const {
  std::vector<int> input;
  input.reserve(target_ids.size());
  input.push_back(text::Tokenizer::kBos);
  for (std::size_t i = 0; i + 1 < target_ids.size(); ++i) {
    input.push_back(target_ids[i]);
  }
  const Eigen::Index t = static_cast<Eigen::Index>(input.size());
  Tensor x = embedding_.Forward(ctx, input);
  x = nn::MulScalar(x, std::sqrt(static_cast<double>(config_.d_model)));
  x = nn::AddConst(x, nn::SinusoidalPositions(t, config_.d_model));
  x = ctx.Drop(x);
  const Mat causal = nn::CausalMask(t);
  for (const auto& layer : layers_) x = layer.Forward(ctx, x, &causal);
  x = norm_.Forward(ctx, x);
  return head_.Forward(ctx, x);
}

Eigen::VectorXd CharLM::NextLogProbs(const std::vector<int>& prefix) const {
  nn::Graph g;
  Ctx ctx{g};
  std::vector<int> with_next = prefix;
  with_next.push_back(text::Tokenizer::kPad);  // placeholder target slot
  const Tensor logits = ForwardTeacher(ctx, with_next);
  const Tensor logp = nn::LogSoftmaxRows(logits);
  return logp.value().row(logp.rows() - 1).transpose();
}

double CharLM::TrainStep(const std::vector<std::vector<int>>& sequences) {
  if (sequences.empty()) {
    throw DataError("EmptyCorpus", "LM train step needs sequences");
  }
  nn::Graph g;
  util::Rng drop_rng = train_rng_.child("drop" + std::to_string(optimizer_.step_count()));
  Ctx ctx{g, /*train=*/true, config_.dropout, &drop_rng};
  std::vector<Tensor> losses;
  for (const auto& seq : sequences) {
    std::vector<int> target = seq;
    target.push_back(text::Tokenizer::kEos);
    const Tensor logits = ForwardTeacher(ctx, target);
    losses.push_back(nn::NllLoss(nn::LogSoftmaxRows(logits), target));
  }
  Tensor total = losses[0];
  for (std::size_t i = 1; i < losses.size(); ++i) total = nn::Add(total, losses[i]);
  total = nn::MulScalar(total, 1.0 / losses.size());
  if (!std::isfinite(total.scalar())) {
    throw NumericError("NonFiniteLoss", "LM loss is not finite");
  }
  g.Backward(total);
  optimizer_.Step();
  return total.scalar();
}

double CharLM::Perplexity(const std::vector<std::vector<int>>& sequences) const {
  double nll = 0.0;
  long tokens = 0;
  for (const auto& seq : sequences) {
    std::vector<int> target = seq;
    target.push_back(text::Tokenizer::kEos);
    nn::Graph g;
    Ctx ctx{g};
    const Tensor logp = nn::LogSoftmaxRows(ForwardTeacher(ctx, target));
    for (std::size_t i = 0; i < target.size(); ++i) {
      nll -= logp.value()(static_cast<Eigen::Index>(i), target[i]);
      ++tokens;
    }
  }
  return std::exp(nll / std::max<long>(1, tokens));
}

void CharLM::Save(const std::string& path) const {
  // Reuse the checkpoint container; the model config slot carries a valid
  // dummy and the LM config rides in the metadata.
  model::ModelConfig dummy;
  json meta;
  meta["kind"] = "char_lm";
  meta["lm_config"] = json::parse(config_.ToJson());
  meta["step"] = optimizer_.step_count();
  model::SaveCheckpoint(path, dummy, params_, meta.dump());
}

CharLM CharLM::Load(const std::string& path) {
  const auto info = model::PeekCheckpoint(path);
  json meta = json::parse(info.meta_json);
  if (meta.value("kind", "") != "char_lm") {
    throw DataError("UnsupportedFormat", path + " is not a character LM");
  }
  CharLM lm(CharLmConfig::FromJson(meta.at("lm_config").dump()), /*seed=*/0);
  model::LoadCheckpoint(path, lm.params_);
  lm.optimizer_.set_step_count(meta.value("step", 0));
  return lm;
}

}  // namespace sawt::task
