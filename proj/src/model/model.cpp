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

#include "sawt/model/model.h"

#include <cmath>

#include "sawt/util/error.h"

namespace sawt::model {

using nn::Ctx;
using nn::Mat;
using nn::Tensor;

SpeechTextModel::SpeechTextModel(ModelConfig config, std::uint64_t seed)
    : config_(std::move(config)) {
  config_.Validate();
  util::Rng rng(seed);

  // Speech encoder pre-net: strided conv stack on the raw waveform.
  int in_ch = 1;
  for (std::size_t i = 0; i < config_.conv_kernels.size(); ++i) {
    const int k = config_.conv_kernels[i];
    const int s = config_.conv_strides[i];
    const std::string name = "speech_prenet.conv" + std::to_string(i);
    // Left pad of k - s makes every layer emit exactly floor(T/s) frames.
    conv_stack_.emplace_back(params_, name, in_ch, config_.conv_channels, k, s,
                             k - s, 0, rng);
    conv_norms_.emplace_back(params_, name + ".ln", config_.conv_channels);
    in_ch = config_.conv_channels;
  }
  conv_proj_ = nn::Linear(params_, "speech_prenet.proj", config_.conv_channels,
                          config_.d_model, rng);
  {
    util::Rng mr = rng.child("speech_prenet.mask");
    mask_embedding_ = params_.Create("speech_prenet.mask",
                                     nn::NormalInit(1, config_.d_model, 0.1, mr));
  }

  text_embedding_ = nn::Embedding(params_, "text_prenet.embed",
                                  config_.vocab_size, config_.d_model, rng);
  text_out_ = nn::Linear(params_, "text_postnet.out", config_.d_model,
                         config_.vocab_size, rng);

  dec_prenet_in_ = nn::Linear(params_, "speech_dec_prenet.in", config_.mel_bins,
                              config_.dec_prenet_hidden, rng);
  dec_prenet_hidden_ =
      nn::Linear(params_, "speech_dec_prenet.hidden", config_.dec_prenet_hidden,
                 config_.dec_prenet_hidden, rng);
  dec_prenet_out_ = nn::Linear(params_, "speech_dec_prenet.out",
                               config_.dec_prenet_hidden, config_.d_model, rng);
  speaker_embedding_ = params_.Create(
      "speech_dec_prenet.speaker", Mat::Zero(config_.n_speakers, config_.d_model));

  mel_head_ = nn::Linear(params_, "speech_postnet.mel", config_.d_model,
                         config_.mel_bins, rng);
  stop_head_ = nn::Linear(params_, "speech_postnet.stop", config_.d_model, 1, rng);
  const int pk = config_.postnet_kernel;
  for (int i = 0; i < config_.postnet_layers; ++i) {
    const bool last = i == config_.postnet_layers - 1;
    const int ch_in = i == 0 ? config_.mel_bins : config_.postnet_channels;
    const int ch_out = last ? config_.mel_bins : config_.postnet_channels;
    const std::string name = "speech_postnet.conv" + std::to_string(i);
    postnet_convs_.emplace_back(params_, name, ch_in, ch_out, pk, 1,
                                (pk - 1) / 2, pk / 2, rng);
    if (!last) postnet_norms_.emplace_back(params_, name + ".ln", ch_out);
  }

  for (int i = 0; i < config_.enc_layers; ++i) {
    encoder_layers_.emplace_back(params_, "encoder.layer" + std::to_string(i),
                                 config_.d_model, config_.n_heads,
                                 config_.ffn_dim, rng);
  }
  encoder_norm_ = nn::LayerNorm(params_, "encoder.norm", config_.d_model);
  for (int i = 0; i < config_.dec_layers; ++i) {
    decoder_layers_.emplace_back(params_, "decoder.layer" + std::to_string(i),
                                 config_.d_model, config_.n_heads,
                                 config_.ffn_dim, rng);
  }
  decoder_norm_ = nn::LayerNorm(params_, "decoder.norm", config_.d_model);

  unit_head_ = nn::Linear(params_, "unit_head.out", config_.d_model,
                          config_.unit_count, rng);

  const int dg = config_.d_model / config_.codebook_groups;
  for (int g = 0; g < config_.codebook_groups; ++g) {
    const std::string name = "codebook.g" + std::to_string(g);
    util::Rng cr = rng.child(name);
    const double bound = std::sqrt(3.0 / dg);
    Mat init(config_.codebook_entries, dg);
    for (Eigen::Index i = 0; i < init.rows(); ++i)
      for (Eigen::Index j = 0; j < init.cols(); ++j)
        init(i, j) = cr.uniform(-bound, bound);
    codebook_.push_back(params_.Create(name, std::move(init)));
  }
}

int SpeechTextModel::PrenetFrameCount(long samples, const ModelConfig& config) {
  long t = samples;
  for (const int s : config.conv_strides) t /= s;
  return static_cast<int>(t);
}

Tensor SpeechTextModel::SpeechEncoderPrenet(Ctx& ctx,
                                            const Eigen::VectorXd& wave,
                                            const audio::MaskSpec* mask) const {
  if (wave.size() < config_.stride_product()) {
    throw DataError("TooShort",
                    "waveform of " + std::to_string(wave.size()) +
                        " samples is shorter than one pre-net frame (" +
                        std::to_string(config_.stride_product()) + ")");
  }
  Tensor x = ctx.graph.Constant(wave);
  for (std::size_t i = 0; i < conv_stack_.size(); ++i) {
    x = nn::Gelu(conv_norms_[i].Forward(ctx, conv_stack_[i].Forward(ctx, x)));
  }
  x = conv_proj_.Forward(ctx, x);

  const Eigen::Index frames = x.rows();
  if (mask != nullptr) {
    Eigen::VectorXd keep = Eigen::VectorXd::Ones(frames);
    Mat masked_col = Mat::Zero(frames, 1);
    for (const int idx : mask->indices()) {
      if (idx < frames) {
        keep[idx] = 0.0;
        masked_col(idx, 0) = 1.0;
      }
    }
    const Tensor fill = nn::MatMul(ctx.graph.Constant(masked_col),
                                   ctx.graph.Param(*mask_embedding_));
    x = nn::Add(nn::RowScale(x, keep), fill);
  }
  x = nn::AddConst(x, nn::SinusoidalPositions(frames, config_.d_model));
  return ctx.Drop(x);
}

Tensor SpeechTextModel::TextEncoderPrenet(Ctx& ctx,
                                          const std::vector<int>& ids) const {
  const Tensor emb = text_embedding_.Forward(ctx, ids);
  const Tensor scaled =
      nn::MulScalar(emb, std::sqrt(static_cast<double>(config_.d_model)));
  return ctx.Drop(nn::AddConst(
      scaled, nn::SinusoidalPositions(static_cast<Eigen::Index>(ids.size()),
                                      config_.d_model)));
}

Tensor SpeechTextModel::TextDecoderPrenet(Ctx& ctx,
                                          const std::vector<int>& ids) const {
  return TextEncoderPrenet(ctx, ids);
}

Tensor SpeechTextModel::TextDecoderPostnet(Ctx& ctx,
                                           const Tensor& hidden) const {
  return text_out_.Forward(ctx, hidden);
}

Tensor SpeechTextModel::SpeechDecoderPrenet(Ctx& ctx, const Mat& mel_frames,
                                            int speaker) const {
  if (mel_frames.cols() != config_.mel_bins) {
    throw DataError("DimMismatch",
                    "mel input has " + std::to_string(mel_frames.cols()) +
                        " bins, config expects " +
                        std::to_string(config_.mel_bins));
  }
  if (speaker < 0 || speaker >= config_.n_speakers) {
    throw DataError("InvalidId", "speaker id out of range");
  }
  Tensor x = ctx.graph.Constant(mel_frames);
  x = nn::Gelu(dec_prenet_in_.Forward(ctx, x));
  x = nn::Gelu(dec_prenet_hidden_.Forward(ctx, x));
  x = dec_prenet_out_.Forward(ctx, x);
  const Tensor spk = nn::GatherRows(ctx.graph.Param(*speaker_embedding_),
                                    std::vector<int>{speaker});
  x = nn::RowBroadcastAdd(x, spk);
  x = nn::AddConst(x, nn::SinusoidalPositions(x.rows(), config_.d_model));
  return ctx.Drop(x);
}

Tensor SpeechTextModel::PostnetResidual(Ctx& ctx,
                                        const Tensor& mel_before) const {
  Tensor residual = mel_before;
  for (std::size_t i = 0; i < postnet_convs_.size(); ++i) {
    residual = postnet_convs_[i].Forward(ctx, residual);
    if (i + 1 < postnet_convs_.size()) {
      residual = ctx.Drop(nn::Tanh(postnet_norms_[i].Forward(ctx, residual)));
    }
  }
  return residual;
}

SpeechTextModel::SpeechPostnetOut SpeechTextModel::SpeechDecoderPostnet(
    Ctx& ctx, const Tensor& hidden) const {
  SpeechPostnetOut out;
  out.mel_before = mel_head_.Forward(ctx, hidden);
  out.stop_logits = stop_head_.Forward(ctx, hidden);
  out.mel_after =
      nn::Add(out.mel_before, PostnetResidual(ctx, out.mel_before));
  return out;
}

Tensor SpeechTextModel::Encoder(Ctx& ctx, const Tensor& states,
                                int valid_len) const {
  const Eigen::Index t = states.rows();
  Mat mask;
  const Mat* mask_ptr = nullptr;
  if (valid_len >= 0 && valid_len < t) {
    mask = nn::KeyPaddingMask(t, t, valid_len);
    mask_ptr = &mask;
  }
  Tensor x = states;
  for (const auto& layer : encoder_layers_) {
    x = layer.Forward(ctx, x, mask_ptr);
  }
  return encoder_norm_.Forward(ctx, x);
}

Tensor SpeechTextModel::Decoder(Ctx& ctx, const Tensor& targets,
                                const Tensor& memory, int target_valid,
                                int memory_valid) const {
  const Eigen::Index t = targets.rows();
  const Eigen::Index m = memory.rows();
  Mat self_mask = nn::CausalMask(t);
  if (target_valid >= 0 && target_valid < t) {
    self_mask += nn::KeyPaddingMask(t, t, target_valid);
  }
  Mat cross_mask;
  const Mat* cross_ptr = nullptr;
  if (memory_valid >= 0 && memory_valid < m) {
    cross_mask = nn::KeyPaddingMask(t, m, memory_valid);
    cross_ptr = &cross_mask;
  }
  Tensor x = targets;
  for (const auto& layer : decoder_layers_) {
    x = layer.Forward(ctx, x, memory, &self_mask, cross_ptr);
  }
  return decoder_norm_.Forward(ctx, x);
}

Tensor SpeechTextModel::UnitLogits(Ctx& ctx,
                                   const Tensor& encoder_states) const {
  return unit_head_.Forward(ctx, encoder_states);
}

SpeechTextModel::QuantizeOut SpeechTextModel::Quantize(
    Ctx& ctx, const Tensor& states, double temperature) const {
  if (states.cols() != config_.d_model) {
    throw DataError("DimMismatch", "quantizer input dim != d_model");
  }
  if (temperature <= 0.0) {
    throw DataError("InvalidArgument", "temperature must be positive");
  }
  const int groups = config_.codebook_groups;
  const Eigen::Index dg = config_.d_model / groups;
  const Eigen::Index t = states.rows();
  const Eigen::Index v = config_.codebook_entries;

  QuantizeOut out;
  std::vector<Tensor> quantized_parts;
  for (int g = 0; g < groups; ++g) {
    const Tensor xg = nn::SliceCols(states, g * dg, dg);
    const Tensor entries = ctx.graph.Param(*codebook_[g]);

    // Squared distances: |x|^2 + |e|^2 - 2 x e^T, built from ops so the
    // soft probabilities stay differentiable for the diversity loss.
    const Tensor x_sq = nn::SumOverCols(nn::Mul(xg, xg));        // t x 1
    const Tensor e_sq = nn::SumOverCols(nn::Mul(entries, entries));  // v x 1
    const Tensor cross = nn::MatMul(xg, nn::Transpose(entries));     // t x v
    const Tensor x_bc =
        nn::MatMul(x_sq, ctx.graph.Constant(Mat::Ones(1, v)));
    const Tensor e_bc =
        nn::MatMul(ctx.graph.Constant(Mat::Ones(t, 1)), nn::Transpose(e_sq));
    const Tensor dist =
        nn::Sub(nn::Add(x_bc, e_bc), nn::MulScalar(cross, 2.0));

    std::vector<int> idx(t);
    for (Eigen::Index i = 0; i < t; ++i) {
      int best = 0;
      double best_d = dist.value()(i, 0);
      for (Eigen::Index j = 1; j < v; ++j) {
        if (dist.value()(i, j) < best_d) {
          best_d = dist.value()(i, j);
          best = static_cast<int>(j);
        }
      }
      idx[i] = best;
    }
    const Tensor hard = nn::GatherRows(entries, idx);
    // Straight-through: value is the codebook entry, gradient flows to both
    // the input slice and the selected entry.
    quantized_parts.push_back(nn::Add(hard, nn::Sub(xg, nn::Detach(xg))));
    out.indices.push_back(std::move(idx));
    out.soft_probs.push_back(
        nn::SoftmaxRows(nn::MulScalar(dist, -1.0 / temperature)));
  }
  out.quantized = groups == 1 ? quantized_parts[0] : nn::HConcat(quantized_parts);
  return out;
}

}  // namespace sawt::model
