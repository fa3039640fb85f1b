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

#include "sawt/model/config.h"

#include <nlohmann/json.hpp>

#include "sawt/util/error.h"

namespace sawt::model {

using nlohmann::json;

void ModelConfig::Validate() const {
  if (d_model < 1 || n_heads < 1 || enc_layers < 1 || dec_layers < 1 ||
      ffn_dim < 1 || vocab_size < 1 || mel_bins < 1 || unit_count < 1 ||
      span_len < 1 || codebook_groups < 1 || codebook_entries < 1 ||
      reduction_factor < 1 || conv_channels < 1 || n_speakers < 1) {
    throw DataError("InvalidConfig", "all model dimensions must be >= 1");
  }
  if (d_model % n_heads != 0) {
    throw DataError("InvalidConfig", "d_model must be divisible by n_heads");
  }
  if (d_model % codebook_groups != 0) {
    throw DataError("InvalidConfig",
                    "d_model must be divisible by codebook_groups");
  }
  if (dropout < 0.0 || dropout >= 1.0) {
    throw DataError("InvalidConfig", "dropout must be in [0, 1)");
  }
  if (mix_prob < 0.0 || mix_prob > 1.0) {
    throw DataError("InvalidConfig", "mix_prob must be in [0, 1]");
  }
  if (conv_kernels.size() != conv_strides.size() || conv_kernels.empty()) {
    throw DataError("InvalidConfig", "conv kernel/stride lists must match");
  }
  for (std::size_t i = 0; i < conv_kernels.size(); ++i) {
    if (conv_kernels[i] < conv_strides[i]) {
      throw DataError("InvalidConfig", "conv kernel must be >= stride");
    }
  }
  // The 20 ms unit-label frame rate depends on this downsampling factor.
  if (stride_product() != 320) {
    throw DataError("InvalidConfig",
                    "speech pre-net strides must multiply to 320");
  }
}

std::string ModelConfig::ToJson() const {
  json j;
  j["d_model"] = d_model;
  j["n_heads"] = n_heads;
  j["enc_layers"] = enc_layers;
  j["dec_layers"] = dec_layers;
  j["ffn_dim"] = ffn_dim;
  j["dropout"] = dropout;
  j["vocab_size"] = vocab_size;
  j["mel_bins"] = mel_bins;
  j["unit_count"] = unit_count;
  j["span_len"] = span_len;
  j["mix_prob"] = mix_prob;
  j["conv_kernels"] = conv_kernels;
  j["conv_strides"] = conv_strides;
  j["conv_channels"] = conv_channels;
  j["codebook_groups"] = codebook_groups;
  j["codebook_entries"] = codebook_entries;
  j["reduction_factor"] = reduction_factor;
  j["dec_prenet_hidden"] = dec_prenet_hidden;
  j["postnet_channels"] = postnet_channels;
  j["postnet_layers"] = postnet_layers;
  j["postnet_kernel"] = postnet_kernel;
  j["n_speakers"] = n_speakers;
  return j.dump(2);
}

ModelConfig ModelConfig::FromJson(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw DataError("ParseError", std::string("model config: ") + e.what());
  }
  ModelConfig c;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
  };
  get("d_model", c.d_model);
  get("n_heads", c.n_heads);
  get("enc_layers", c.enc_layers);
  get("dec_layers", c.dec_layers);
  get("ffn_dim", c.ffn_dim);
  get("dropout", c.dropout);
  get("vocab_size", c.vocab_size);
  get("mel_bins", c.mel_bins);
  get("unit_count", c.unit_count);
  get("span_len", c.span_len);
  get("mix_prob", c.mix_prob);
  get("conv_kernels", c.conv_kernels);
  get("conv_strides", c.conv_strides);
  get("conv_channels", c.conv_channels);
  get("codebook_groups", c.codebook_groups);
  get("codebook_entries", c.codebook_entries);
  get("reduction_factor", c.reduction_factor);
  get("dec_prenet_hidden", c.dec_prenet_hidden);
  get("postnet_channels", c.postnet_channels);
  get("postnet_layers", c.postnet_layers);
  get("postnet_kernel", c.postnet_kernel);
  get("n_speakers", c.n_speakers);
  c.Validate();
  return c;
}

ModelConfig ModelConfig::Toy(int vocab_size) {
  ModelConfig c;
  c.vocab_size = vocab_size;
  c.Validate();
  return c;
}

ModelConfig ModelConfig::Paper(int vocab_size) {
  ModelConfig c;
  c.d_model = 768;
  c.n_heads = 12;
  c.enc_layers = 12;
  c.dec_layers = 6;
  c.ffn_dim = 3072;
  c.dropout = 0.1;
  c.vocab_size = vocab_size;
  c.unit_count = 500;
  c.conv_channels = 512;
  c.codebook_groups = 2;
  c.codebook_entries = 320;
  c.dec_prenet_hidden = 256;
  c.postnet_channels = 256;
  c.postnet_layers = 5;
  c.Validate();
  return c;
}

ModelConfig ModelConfig::Preset(const std::string& name, int vocab_size) {
  if (name == "toy") return Toy(vocab_size);
  if (name == "paper") return Paper(vocab_size);
  throw UsageError("unknown preset '" + name + "' (expected toy or paper)");
}

}  // namespace sawt::model
