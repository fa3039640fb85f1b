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

#ifndef SAWT_MODEL_MODEL_H_
#define SAWT_MODEL_MODEL_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sawt/audio/mask.h"
#include "sawt/model/config.h"
#include "sawt/nn/layers.h"
#include "sawt/nn/tensor.h"

namespace sawt::model {

// Shared encoder-decoder transformer with modality-specific pre- and
// post-nets: a raw-waveform convolutional speech encoder pre-net, text
// embedding pre-nets, a mel-frame speech decoder pre-net, text/unit/mel/stop
// heads, and a grouped vector-quantization codebook bridging the two
// modalities. All forwards are per-utterance; batching happens by summing
// per-utterance losses.
class SpeechTextModel {
 public:
  SpeechTextModel(ModelConfig config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  nn::ParamStore& params() { return params_; }
  const nn::ParamStore& params() const { return params_; }

  // ---- speech encoder pre-net ----
  // Frames out = floor(samples / 320). When `mask` is given, frames inside
  // its spans are replaced by the learned mask embedding before positions
  // are added.
  nn::Tensor SpeechEncoderPrenet(nn::Ctx& ctx, const Eigen::VectorXd& wave,
                                 const audio::MaskSpec* mask = nullptr) const;
  static int PrenetFrameCount(long samples, const ModelConfig& config);
  int PrenetFrameCount(long samples) const {
    return PrenetFrameCount(samples, config_);
  }

  // ---- text pre/post-nets (embedding shared between encoder and decoder) --
  nn::Tensor TextEncoderPrenet(nn::Ctx& ctx, const std::vector<int>& ids) const;
  nn::Tensor TextDecoderPrenet(nn::Ctx& ctx, const std::vector<int>& ids) const;
  nn::Tensor TextDecoderPostnet(nn::Ctx& ctx, const nn::Tensor& hidden) const;

  // ---- speech decoder pre/post-nets ----
  nn::Tensor SpeechDecoderPrenet(nn::Ctx& ctx, const nn::Mat& mel_frames,
                                 int speaker = 0) const;
  struct SpeechPostnetOut {
    nn::Tensor mel_before;  // T x mel_bins
    nn::Tensor mel_after;   // mel_before + convolutional residual
    nn::Tensor stop_logits; // T x 1
  };
  SpeechPostnetOut SpeechDecoderPostnet(nn::Ctx& ctx,
                                        const nn::Tensor& hidden) const;
  // Convolutional refinement applied on top of mel_before (also usable on a
  // fully generated sequence after autoregressive decoding).
  nn::Tensor PostnetResidual(nn::Ctx& ctx, const nn::Tensor& mel_before) const;

  // ---- shared backbone ----
  // `valid_len` < 0 means every frame is valid. Padded key positions never
  // influence valid outputs.
  nn::Tensor Encoder(nn::Ctx& ctx, const nn::Tensor& states,
                     int valid_len = -1) const;
  nn::Tensor Decoder(nn::Ctx& ctx, const nn::Tensor& targets,
                     const nn::Tensor& memory, int target_valid = -1,
                     int memory_valid = -1) const;

  // ---- masked-unit prediction head ----
  nn::Tensor UnitLogits(nn::Ctx& ctx, const nn::Tensor& encoder_states) const;

  // ---- cross-modal quantizer ----
  struct QuantizeOut {
    nn::Tensor quantized;                  // T x d_model, on the codebook image
    std::vector<std::vector<int>> indices; // per group, one entry per frame
    std::vector<nn::Tensor> soft_probs;    // per group, T x V
  };
  // Nearest codebook entry per group with a straight-through gradient; the
  // soft probabilities (softmax over -distance/temperature) feed the
  // diversity loss.
  QuantizeOut Quantize(nn::Ctx& ctx, const nn::Tensor& states,
                       double temperature = 1.0) const;

  nn::Parameter* mask_embedding() const { return mask_embedding_; }

 private:
  ModelConfig config_;
  nn::ParamStore params_;

  std::vector<nn::Conv1dLayer> conv_stack_;
  std::vector<nn::LayerNorm> conv_norms_;
  nn::Linear conv_proj_;
  nn::Parameter* mask_embedding_ = nullptr;

  nn::Embedding text_embedding_;
  nn::Linear text_out_;

  nn::Linear dec_prenet_in_, dec_prenet_hidden_, dec_prenet_out_;
  nn::Parameter* speaker_embedding_ = nullptr;
  nn::Linear mel_head_, stop_head_;
  std::vector<nn::Conv1dLayer> postnet_convs_;
  std::vector<nn::LayerNorm> postnet_norms_;

  std::vector<nn::EncoderLayer> encoder_layers_;
  nn::LayerNorm encoder_norm_;
  std::vector<nn::DecoderLayer> decoder_layers_;
  nn::LayerNorm decoder_norm_;

  nn::Linear unit_head_;
  std::vector<nn::Parameter*> codebook_;  // per group, V x (d_model / G)
};

}  // namespace sawt::model

#endif  // SAWT_MODEL_MODEL_H_
