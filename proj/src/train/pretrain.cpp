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

#include "sawt/train/pretrain.h"

#include <cmath>

#include <nlohmann/json.hpp>

#include "sawt/util/error.h"

namespace sawt::train {

using model::SpeechTextModel;
using nn::Ctx;
using nn::Mat;
using nn::Tensor;
using nlohmann::json;

double TrainConfig::QuantTemperature(int step) const {
  return std::max(quant_temp_min,
                  quant_temp_start * std::pow(quant_temp_decay, step));
}

std::string TrainConfig::ToJson() const {
  json j;
  j["lr"] = lr;
  j["warmup_updates"] = warmup_updates;
  j["max_updates"] = max_updates;
  j["beta1"] = beta1;
  j["beta2"] = beta2;
  j["adam_eps"] = adam_eps;
  j["clip_norm"] = clip_norm;
  j["w_mlm"] = w_mlm;
  j["w_sdae"] = w_sdae;
  j["w_tdae"] = w_tdae;
  j["w_div"] = w_div;
  j["mask_start_prob"] = mask_start_prob;
  j["text_corrupt_rate"] = text_corrupt_rate;
  j["text_corrupt_mean_span"] = text_corrupt_mean_span;
  j["stop_pos_weight"] = stop_pos_weight;
  j["quant_temp_start"] = quant_temp_start;
  j["quant_temp_min"] = quant_temp_min;
  j["quant_temp_decay"] = quant_temp_decay;
  j["seed"] = seed;
  j["log_every"] = log_every;
  j["checkpoint_every"] = checkpoint_every;
  return j.dump(2);
}

TrainConfig TrainConfig::FromJson(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw DataError("ParseError", std::string("train config: ") + e.what());
  }
  TrainConfig c;
  c.lr = j.value("lr", c.lr);
  c.warmup_updates = j.value("warmup_updates", c.warmup_updates);
  c.max_updates = j.value("max_updates", c.max_updates);
  c.beta1 = j.value("beta1", c.beta1);
  c.beta2 = j.value("beta2", c.beta2);
  c.adam_eps = j.value("adam_eps", c.adam_eps);
  c.clip_norm = j.value("clip_norm", c.clip_norm);
  c.w_mlm = j.value("w_mlm", c.w_mlm);
  c.w_sdae = j.value("w_sdae", c.w_sdae);
  c.w_tdae = j.value("w_tdae", c.w_tdae);
  c.w_div = j.value("w_div", c.w_div);
  c.mask_start_prob = j.value("mask_start_prob", c.mask_start_prob);
  c.text_corrupt_rate = j.value("text_corrupt_rate", c.text_corrupt_rate);
  c.text_corrupt_mean_span =
      j.value("text_corrupt_mean_span", c.text_corrupt_mean_span);
  c.stop_pos_weight = j.value("stop_pos_weight", c.stop_pos_weight);
  c.quant_temp_start = j.value("quant_temp_start", c.quant_temp_start);
  c.quant_temp_min = j.value("quant_temp_min", c.quant_temp_min);
  c.quant_temp_decay = j.value("quant_temp_decay", c.quant_temp_decay);
  c.seed = j.value("seed", c.seed);
  c.log_every = j.value("log_every", c.log_every);
  c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
  return c;
}

TrainConfig TrainConfig::Toy() {
  TrainConfig c;
  c.lr = 1e-3;
  c.warmup_updates = 100;
  c.max_updates = 2000;
  c.clip_norm = 5.0;
  c.checkpoint_every = 500;
  return c;
}

std::string LossReport::ToJsonLine() const {
  json j;
  j["step"] = step;
  j["lr"] = lr;
  j["speech_mlm"] = speech_mlm;
  j["speech_dae"] = speech_dae;
  j["text_dae"] = text_dae;
  j["diversity"] = diversity;
  j["total"] = total;
  j["masked_frames"] = masked_frames;
  j["codes_replaced"] = codes_replaced;
  return j.dump();
}

Tensor SpeechMlmLoss(const Tensor& unit_logits, const std::vector<int>& labels,
                     const audio::MaskSpec& mask, int* masked_count) {
  const Eigen::Index aligned = std::min<Eigen::Index>(
      unit_logits.rows(), static_cast<Eigen::Index>(labels.size()));
  std::vector<int> rows;
  std::vector<int> targets;
  for (const int idx : mask.indices()) {
    if (idx < aligned) {
      rows.push_back(idx);
      targets.push_back(labels[idx]);
    }
  }
  if (masked_count != nullptr) *masked_count = static_cast<int>(rows.size());
  nn::Graph* g = nn::detail::TensorAccess::graph(unit_logits);
  if (rows.empty()) return g->Constant(Mat::Zero(1, 1));
  const Tensor gathered = nn::GatherRows(unit_logits, rows);
  return nn::NllLoss(nn::LogSoftmaxRows(gathered), targets);
}

MelLossParts MelReconLoss(const SpeechTextModel::SpeechPostnetOut& out,
                          const Mat& target_mel, int valid_frames,
                          double stop_pos_weight) {
  if (out.mel_before.cols() != target_mel.cols()) {
    throw NumericError("ShapeMismatch", "mel bins differ from target");
  }
  if (valid_frames < 1 || valid_frames > out.mel_before.rows() ||
      valid_frames > target_mel.rows()) {
    throw NumericError("ShapeMismatch", "invalid frame count for mel loss");
  }
  nn::Graph* g = nn::detail::TensorAccess::graph(out.mel_before);
  const Tensor target = g->Constant(target_mel.topRows(valid_frames));
  const Tensor before = nn::SliceRows(out.mel_before, 0, valid_frames);
  const Tensor after = nn::SliceRows(out.mel_after, 0, valid_frames);

  MelLossParts parts;
  parts.l1_before = nn::MeanAll(nn::Abs(nn::Sub(before, target)));
  parts.l1_after = nn::MeanAll(nn::Abs(nn::Sub(after, target)));

  // Weighted stop BCE: positive class only at the last valid frame.
  const Tensor stop = nn::SliceRows(out.stop_logits, 0, valid_frames);
  Mat pos = Mat::Zero(valid_frames, 1);
  pos(valid_frames - 1, 0) = stop_pos_weight;  // w * z
  Mat neg = Mat::Ones(valid_frames, 1);
  neg(valid_frames - 1, 0) = 0.0;  // 1 - z
  parts.stop_bce = nn::MeanAll(
      nn::Add(nn::MulConst(nn::Softplus(nn::Neg(stop)), pos),
              nn::MulConst(nn::Softplus(stop), neg)));
  return parts;
}

Tensor SpeechDaeLoss(const SpeechTextModel::SpeechPostnetOut& out,
                     const Mat& target_mel, int valid_frames,
                     double stop_pos_weight) {
  const MelLossParts parts =
      MelReconLoss(out, target_mel, valid_frames, stop_pos_weight);
  return nn::Add(nn::Add(parts.l1_before, parts.l1_after), parts.stop_bce);
}

CorruptedText CorruptText(const std::vector<int>& ids, double rate,
                          double mean_span, util::Rng& rng, int mask_id) {
  if (rate < 0.0 || rate > 1.0) {
    throw DataError("InvalidArgument", "corruption rate must be in [0, 1]");
  }
  CorruptedText out;
  out.corrupted = ids;
  const int len = static_cast<int>(ids.size());
  if (len == 0) return out;
  const int target = static_cast<int>(std::lround(rate * len));
  std::vector<std::uint8_t> masked(len, 0);
  int covered = 0;
  while (covered < target) {
    const int start = rng.uniform_int(0, len - 1);
    const int span = std::max(1, rng.poisson(mean_span));
    for (int i = start; i < std::min(len, start + span); ++i) {
      if (masked[i]) continue;
      masked[i] = 1;
      if (++covered == target) break;
    }
  }
  for (int i = 0; i < len; ++i) {
    if (masked[i]) out.corrupted[i] = mask_id;
  }
  out.masked = covered;
  return out;
}

Tensor TextDaeLoss(const Tensor& decoder_logits,
                   const std::vector<int>& original_ids) {
  if (decoder_logits.rows() != static_cast<Eigen::Index>(original_ids.size())) {
    throw NumericError("ShapeMismatch",
                       "decoder emitted " + std::to_string(decoder_logits.rows()) +
                           " rows for " + std::to_string(original_ids.size()) +
                           " targets");
  }
  return nn::NllLoss(nn::LogSoftmaxRows(decoder_logits), original_ids);
}

MixResult MixQuantized(Ctx& ctx, const SpeechTextModel& model,
                       const Tensor& states, double mix_prob,
                       double temperature, util::Rng& rng) {
  if (mix_prob < 0.0 || mix_prob > 1.0) {
    throw DataError("InvalidArgument", "mix_prob must be in [0, 1]");
  }
  const Eigen::Index t = states.rows();
  MixResult result;
  result.total = static_cast<int>(t);
  auto quant = model.Quantize(ctx, states, temperature);
  result.soft_probs = std::move(quant.soft_probs);

  Eigen::VectorXd keep = Eigen::VectorXd::Ones(t);
  Eigen::VectorXd replace = Eigen::VectorXd::Zero(t);
  for (Eigen::Index i = 0; i < t; ++i) {
    if (rng.bernoulli(mix_prob)) {
      keep[i] = 0.0;
      replace[i] = 1.0;
      ++result.replaced;
    }
  }
  if (result.replaced == 0) {
    result.mixed = states;
  } else {
    result.mixed = nn::Add(nn::RowScale(states, keep),
                           nn::RowScale(quant.quantized, replace));
  }
  return result;
}

Tensor DiversityLoss(const Tensor& usage) {
  const Eigen::Index groups = usage.rows();
  const Eigen::Index v = usage.cols();
  for (Eigen::Index gi = 0; gi < groups; ++gi) {
    const double sum = usage.value().row(gi).sum();
    if (std::abs(sum - 1.0) > 1e-6) {
      throw NumericError("NonDistribution",
                         "usage row " + std::to_string(gi) + " sums to " +
                             std::to_string(sum));
    }
  }
  // (G*V - sum_g exp H_g) / (G*V)
  const Tensor entropy = nn::Neg(nn::SumOverCols(nn::XLogX(usage)));
  const Tensor exp_h_sum = nn::SumAll(nn::Exp(entropy));
  const double gv = static_cast<double>(groups * v);
  return nn::MulScalar(nn::AddScalar(nn::Neg(exp_h_sum), gv), 1.0 / gv);
}

Pretrainer::Pretrainer(SpeechTextModel& model, audio::ClusterModel units,
                       TrainConfig config, audio::MelConfig mel_config)
    : model_(model),
      units_(std::move(units)),
      config_(config),
      mel_config_(mel_config) {
  if (units_.num_clusters() != model_.config().unit_count) {
    throw DataError("DimMismatch",
                    "cluster model has " + std::to_string(units_.num_clusters()) +
                        " units, model expects " +
                        std::to_string(model_.config().unit_count));
  }
  nn::AdamConfig a;
  a.lr = config_.lr;
  a.beta1 = config_.beta1;
  a.beta2 = config_.beta2;
  a.eps = config_.adam_eps;
  a.clip_norm = config_.clip_norm;
  a.warmup_updates = config_.warmup_updates;
  optimizer_ = nn::AdamOptimizer(model_.params(), a);
}

const Pretrainer::Features& Pretrainer::FeaturesFor(const std::string& id,
                                                    const Eigen::VectorXd& wave) {
  auto it = cache_.find(id);
  if (it != cache_.end()) return it->second;
  audio::Waveform w;
  w.samples.assign(wave.data(), wave.data() + wave.size());
  const auto mel = audio::LogMel(w, mel_config_);
  Features f;
  f.labels = audio::AssignLabels(units_, mel);
  f.mel = mel.frames;
  return cache_.emplace(id, std::move(f)).first->second;
}

LossReport Pretrainer::Step(const data::Batch& speech_batch,
                            const data::Batch& text_batch) {
  const int step = optimizer_.step_count() + 1;
  util::Rng step_rng(util::Rng::mix(config_.seed, static_cast<std::uint64_t>(step)));
  util::Rng mask_rng = step_rng.child("mask");
  util::Rng corrupt_rng = step_rng.child("corrupt");
  util::Rng mix_rng = step_rng.child("mix");
  util::Rng drop_rng = step_rng.child("dropout");
  const double temperature = config_.QuantTemperature(step - 1);

  nn::Graph graph;
  Ctx ctx{graph, /*train=*/true, model_.config().dropout, &drop_rng};

  LossReport report;
  report.step = step;

  // ---- speech objectives ----
  std::vector<Tensor> mlm_logit_parts;
  std::vector<int> mlm_targets;
  std::vector<Tensor> sdae_items;
  std::vector<Tensor> usage_sums;  // per group, accumulated 1 x V
  double usage_positions = 0.0;

  auto accumulate_usage = [&](const MixResult& mix) {
    for (std::size_t gi = 0; gi < mix.soft_probs.size(); ++gi) {
      const Tensor sum = nn::SumOverRows(mix.soft_probs[gi]);
      if (usage_sums.size() <= gi) {
        usage_sums.push_back(sum);
      } else {
        usage_sums[gi] = nn::Add(usage_sums[gi], sum);
      }
    }
    usage_positions += mix.total;
    report.codes_replaced += mix.replaced;
  };

  for (int i = 0; i < speech_batch.size(); ++i) {
    const Eigen::VectorXd wave =
        speech_batch.waves.row(i).head(speech_batch.wave_lengths[i]);
    const Features& feats = FeaturesFor(speech_batch.ids[i], wave);

    const int prenet_frames = model_.PrenetFrameCount(wave.size());
    const int aligned = std::min<int>(prenet_frames,
                                      static_cast<int>(feats.labels.size()));
    const audio::MaskSpec mask = audio::SampleMaskSpans(
        aligned, model_.config().span_len, config_.mask_start_prob, mask_rng);

    const Tensor prenet = model_.SpeechEncoderPrenet(ctx, wave, &mask);
    const Tensor encoded = model_.Encoder(ctx, prenet);

    // Masked-unit prediction over the masked frames only.
    std::vector<int> rows;
    for (const int idx : mask.indices()) {
      if (idx < aligned) rows.push_back(idx);
    }
    if (!rows.empty()) {
      mlm_logit_parts.push_back(
          nn::GatherRows(model_.UnitLogits(ctx, encoded), rows));
      for (const int idx : rows) mlm_targets.push_back(feats.labels[idx]);
      report.masked_frames += static_cast<int>(rows.size());
    }

    // Cross-modal mixing feeds the decoder's cross-attention.
    const MixResult mix = MixQuantized(ctx, model_, encoded,
                                       model_.config().mix_prob, temperature,
                                       mix_rng);
    accumulate_usage(mix);

    // Speech denoising: reconstruct the mel frames from the masked input.
    const Eigen::Index t_mel = feats.mel.rows();
    Mat shifted = Mat::Zero(t_mel, feats.mel.cols());
    if (t_mel > 1) shifted.bottomRows(t_mel - 1) = feats.mel.topRows(t_mel - 1);
    const Tensor dec_in = model_.SpeechDecoderPrenet(ctx, shifted);
    const Tensor hidden = model_.Decoder(ctx, dec_in, mix.mixed);
    const auto post = model_.SpeechDecoderPostnet(ctx, hidden);
    sdae_items.push_back(SpeechDaeLoss(post, feats.mel,
                                       static_cast<int>(t_mel),
                                       config_.stop_pos_weight));
  }

  // ---- text objective ----
  std::vector<Tensor> tdae_items;
  for (int i = 0; i < text_batch.size(); ++i) {
    std::vector<int> ids(text_batch.tokens[i].begin(),
                         text_batch.tokens[i].begin() +
                             text_batch.token_lengths[i]);
    if (ids.empty()) continue;
    const auto corrupted = CorruptText(ids, config_.text_corrupt_rate,
                                       config_.text_corrupt_mean_span,
                                       corrupt_rng);
    const Tensor enc_states =
        model_.Encoder(ctx, model_.TextEncoderPrenet(ctx, corrupted.corrupted));
    const MixResult mix = MixQuantized(ctx, model_, enc_states,
                                       model_.config().mix_prob, temperature,
                                       mix_rng);
    accumulate_usage(mix);

    std::vector<int> dec_in = {text::Tokenizer::kBos};
    dec_in.insert(dec_in.end(), ids.begin(), ids.end() - 1);
    std::vector<int> targets = ids;
    const Tensor hidden =
        model_.Decoder(ctx, model_.TextDecoderPrenet(ctx, dec_in), mix.mixed);
    tdae_items.push_back(
        TextDaeLoss(model_.TextDecoderPostnet(ctx, hidden), targets));
  }

  auto mean_of = [&](const std::vector<Tensor>& items) -> Tensor {
    if (items.empty()) return graph.Constant(Mat::Zero(1, 1));
    Tensor acc = items[0];
    for (std::size_t i = 1; i < items.size(); ++i) acc = nn::Add(acc, items[i]);
    return nn::MulScalar(acc, 1.0 / items.size());
  };

  Tensor mlm = mlm_logit_parts.empty()
                   ? graph.Constant(Mat::Zero(1, 1))
                   : nn::NllLoss(nn::LogSoftmaxRows(nn::VConcat(mlm_logit_parts)),
                                 mlm_targets);
  Tensor sdae = mean_of(sdae_items);
  Tensor tdae = mean_of(tdae_items);

  Tensor diversity = graph.Constant(Mat::Zero(1, 1));
  if (!usage_sums.empty() && usage_positions > 0) {
    std::vector<Tensor> rows;
    for (auto& sum : usage_sums) {
      rows.push_back(nn::MulScalar(sum, 1.0 / usage_positions));
    }
    diversity = DiversityLoss(rows.size() == 1 ? rows[0] : nn::VConcat(rows));
  }

  report.speech_mlm = mlm.scalar();
  report.speech_dae = sdae.scalar();
  report.text_dae = tdae.scalar();
  report.diversity = diversity.scalar();
  const struct {
    const char* name;
    double value;
    double weight;
  } terms[] = {{"speech_mlm", report.speech_mlm, config_.w_mlm},
               {"speech_dae", report.speech_dae, config_.w_sdae},
               {"text_dae", report.text_dae, config_.w_tdae},
               {"diversity", report.diversity, config_.w_div}};
  for (const auto& term : terms) {
    if (term.weight != 0.0 && !std::isfinite(term.value)) {
      throw NumericError("NonFiniteLoss",
                         std::string("pretrain term ") + term.name +
                             " is not finite at step " + std::to_string(step));
    }
  }

  const Tensor total =
      nn::Add(nn::Add(nn::MulScalar(mlm, config_.w_mlm),
                      nn::MulScalar(sdae, config_.w_sdae)),
              nn::Add(nn::MulScalar(tdae, config_.w_tdae),
                      nn::MulScalar(diversity, config_.w_div)));
  report.total = total.scalar();

  graph.Backward(total);
  report.lr = optimizer_.Step();
  return report;
}

}  // namespace sawt::train
