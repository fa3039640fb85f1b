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

#include "sawt/train/finetune.h"

#include <cmath>

#include <nlohmann/json.hpp>

#include "sawt/task/ctc.h"
#include "sawt/train/pretrain.h"
#include "sawt/util/error.h"

namespace sawt::train {

using model::SpeechTextModel;
using nn::Ctx;
using nn::Mat;
using nn::Tensor;
using nlohmann::json;

std::string FinetuneConfig::ToJson() const {
  json j;
  j["lr"] = lr;
  j["warmup_updates"] = warmup_updates;
  j["beta1"] = beta1;
  j["beta2"] = beta2;
  j["adam_eps"] = adam_eps;
  j["clip_norm"] = clip_norm;
  j["joint_ce_weight"] = joint_ce_weight;
  j["stop_pos_weight"] = stop_pos_weight;
  j["stop_loss_weight"] = stop_loss_weight;
  j["freeze_prefixes"] = freeze_prefixes;
  j["seed"] = seed;
  return j.dump(2);
}

FinetuneConfig FinetuneConfig::FromJson(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw DataError("ParseError", std::string("finetune config: ") + e.what());
  }
  FinetuneConfig c;
  c.lr = j.value("lr", c.lr);
  c.warmup_updates = j.value("warmup_updates", c.warmup_updates);
  c.beta1 = j.value("beta1", c.beta1);
  c.beta2 = j.value("beta2", c.beta2);
  c.adam_eps = j.value("adam_eps", c.adam_eps);
  c.clip_norm = j.value("clip_norm", c.clip_norm);
  c.joint_ce_weight = j.value("joint_ce_weight", c.joint_ce_weight);
  c.stop_pos_weight = j.value("stop_pos_weight", c.stop_pos_weight);
  c.stop_loss_weight = j.value("stop_loss_weight", c.stop_loss_weight);
  if (j.contains("freeze_prefixes")) {
    c.freeze_prefixes = j["freeze_prefixes"].get<std::vector<std::string>>();
  }
  c.seed = j.value("seed", c.seed);
  return c;
}

namespace {

nn::AdamOptimizer MakeOptimizer(SpeechTextModel& model,
                                const FinetuneConfig& cfg) {
  nn::AdamConfig a;
  a.lr = cfg.lr;
  a.beta1 = cfg.beta1;
  a.beta2 = cfg.beta2;
  a.eps = cfg.adam_eps;
  a.clip_norm = cfg.clip_norm;
  a.warmup_updates = cfg.warmup_updates;
  a.schedule = nn::LrSchedule::kConstant;
  nn::AdamOptimizer opt(model.params(), a);
  opt.SetFrozenPrefixes(cfg.freeze_prefixes);
  return opt;
}

std::vector<int> RowIds(const data::Batch& batch, int i) {
  return std::vector<int>(batch.tokens[i].begin(),
                          batch.tokens[i].begin() + batch.token_lengths[i]);
}

util::Rng StepRng(std::uint64_t seed, int step) {
  return util::Rng(util::Rng::mix(seed, static_cast<std::uint64_t>(step)));
}

}  // namespace

AsrFinetuner::AsrFinetuner(SpeechTextModel& model, FinetuneConfig config)
    : model_(model), config_(config), optimizer_(MakeOptimizer(model, config)) {}

double AsrFinetuner::Step(const data::Batch& batch) {
  const int step = optimizer_.step_count() + 1;
  util::Rng drop_rng = StepRng(config_.seed, step).child("dropout");
  nn::Graph graph;
  Ctx ctx{graph, /*train=*/true, model_.config().dropout, &drop_rng};

  std::vector<Tensor> losses;
  for (int i = 0; i < batch.size(); ++i) {
    const Eigen::VectorXd wave =
        batch.waves.row(i).head(batch.wave_lengths[i]);
    const std::vector<int> ids = RowIds(batch, i);
    const Tensor encoded =
        model_.Encoder(ctx, model_.SpeechEncoderPrenet(ctx, wave));
    const Tensor log_probs =
        nn::LogSoftmaxRows(model_.TextDecoderPostnet(ctx, encoded));
    Tensor item =
        task::CtcLoss(log_probs, ids, text::Tokenizer::kBlank);
    if (config_.joint_ce_weight != 0.0) {
      std::vector<int> dec_in = {text::Tokenizer::kBos};
      dec_in.insert(dec_in.end(), ids.begin(), ids.end());
      std::vector<int> targets = ids;
      targets.push_back(text::Tokenizer::kEos);
      const Tensor hidden = model_.Decoder(
          ctx, model_.TextDecoderPrenet(ctx, dec_in), encoded);
      const Tensor ce = nn::NllLoss(
          nn::LogSoftmaxRows(model_.TextDecoderPostnet(ctx, hidden)), targets);
      item = nn::Add(item, nn::MulScalar(ce, config_.joint_ce_weight));
    }
    losses.push_back(item);
  }
  if (losses.empty()) throw DataError("EmptyCorpus", "empty ASR batch");
  Tensor total = losses[0];
  for (std::size_t i = 1; i < losses.size(); ++i) total = nn::Add(total, losses[i]);
  total = nn::MulScalar(total, 1.0 / losses.size());
  if (!std::isfinite(total.scalar())) {
    throw NumericError("NonFiniteLoss",
                       "ASR loss is not finite at step " + std::to_string(step));
  }
  graph.Backward(total);
  optimizer_.Step();
  return total.scalar();
}

Mat AsrFinetuner::CtcLogProbs(const Eigen::VectorXd& wave) const {
  nn::Graph graph;
  Ctx ctx{graph};
  const Tensor encoded =
      model_.Encoder(ctx, model_.SpeechEncoderPrenet(ctx, wave));
  return nn::LogSoftmaxRows(model_.TextDecoderPostnet(ctx, encoded)).value();
}

TtsFinetuner::TtsFinetuner(SpeechTextModel& model, FinetuneConfig config,
                           audio::MelConfig mel_config)
    : model_(model),
      config_(config),
      mel_config_(mel_config),
      optimizer_(MakeOptimizer(model, config)) {}

const Mat& TtsFinetuner::MelFor(const std::string& id,
                                const Eigen::VectorXd& wave) {
  auto it = mel_cache_.find(id);
  if (it != mel_cache_.end()) return it->second;
  audio::Waveform w;
  w.samples.assign(wave.data(), wave.data() + wave.size());
  return mel_cache_.emplace(id, audio::LogMel(w, mel_config_).frames)
      .first->second;
}

TtsStepReport TtsFinetuner::Step(const data::Batch& batch) {
  const int step = optimizer_.step_count() + 1;
  util::Rng drop_rng = StepRng(config_.seed, step).child("dropout");
  nn::Graph graph;
  Ctx ctx{graph, /*train=*/true, model_.config().dropout, &drop_rng};

  std::vector<MelLossParts> parts;
  for (int i = 0; i < batch.size(); ++i) {
    const Eigen::VectorXd wave =
        batch.waves.row(i).head(batch.wave_lengths[i]);
    const Mat& mel = MelFor(batch.ids[i], wave);
    const std::vector<int> ids = RowIds(batch, i);
    const Tensor encoded =
        model_.Encoder(ctx, model_.TextEncoderPrenet(ctx, ids));

    const Eigen::Index t_mel = mel.rows();
    Mat shifted = Mat::Zero(t_mel, mel.cols());
    if (t_mel > 1) shifted.bottomRows(t_mel - 1) = mel.topRows(t_mel - 1);
    const Tensor hidden = model_.Decoder(
        ctx, model_.SpeechDecoderPrenet(ctx, shifted), encoded);
    const auto post = model_.SpeechDecoderPostnet(ctx, hidden);
    parts.push_back(MelReconLoss(post, mel, static_cast<int>(t_mel),
                                 config_.stop_pos_weight));
  }
  if (parts.empty()) throw DataError("EmptyCorpus", "empty TTS batch");

  auto mean_part = [&](auto select) {
    Tensor acc = select(parts[0]);
    for (std::size_t i = 1; i < parts.size(); ++i) {
      acc = nn::Add(acc, select(parts[i]));
    }
    return nn::MulScalar(acc, 1.0 / parts.size());
  };
  const Tensor l1_before = mean_part([](const MelLossParts& p) { return p.l1_before; });
  const Tensor l1_after = mean_part([](const MelLossParts& p) { return p.l1_after; });
  const Tensor stop = mean_part([](const MelLossParts& p) { return p.stop_bce; });
  const Tensor total =
      nn::Add(nn::Add(l1_before, l1_after),
              nn::MulScalar(stop, config_.stop_loss_weight));

  TtsStepReport report;
  report.l1_before = l1_before.scalar();
  report.l1_after = l1_after.scalar();
  report.stop_bce = stop.scalar();
  report.total = total.scalar();
  if (!std::isfinite(report.total)) {
    throw NumericError("NonFiniteLoss",
                       "TTS loss is not finite at step " + std::to_string(step));
  }
  graph.Backward(total);
  optimizer_.Step();
  return report;
}

double TtsFinetuner::EvalFrameL1(const Eigen::VectorXd& wave,
                                 const std::vector<int>& ids) {
  audio::Waveform w;
  w.samples.assign(wave.data(), wave.data() + wave.size());
  const Mat mel = audio::LogMel(w, mel_config_).frames;
  nn::Graph graph;
  Ctx ctx{graph};
  const Tensor encoded =
      model_.Encoder(ctx, model_.TextEncoderPrenet(ctx, ids));
  const Eigen::Index t_mel = mel.rows();
  Mat shifted = Mat::Zero(t_mel, mel.cols());
  if (t_mel > 1) shifted.bottomRows(t_mel - 1) = mel.topRows(t_mel - 1);
  const Tensor hidden =
      model_.Decoder(ctx, model_.SpeechDecoderPrenet(ctx, shifted), encoded);
  const auto post = model_.SpeechDecoderPostnet(ctx, hidden);
  return (post.mel_after.value() - mel).cwiseAbs().mean();
}

DidFinetuner::DidFinetuner(SpeechTextModel& model, FinetuneConfig config,
                           std::map<std::string, int> label_to_token)
    : model_(model),
      config_(config),
      label_to_token_(std::move(label_to_token)),
      optimizer_(MakeOptimizer(model, config)) {
  for (const auto& [label, token] : label_to_token_) {
    labels_.push_back(label);
    token_ids_.push_back(token);
    if (token < 0 || token >= model_.config().vocab_size) {
      throw DataError("UnknownDialectLabel",
                      "dialect token for '" + label + "' outside vocabulary");
    }
  }
  if (labels_.empty()) {
    throw DataError("UnknownDialectLabel", "no dialect labels configured");
  }
}

double DidFinetuner::Step(const data::Batch& batch) {
  const int step = optimizer_.step_count() + 1;
  util::Rng drop_rng = StepRng(config_.seed, step).child("dropout");
  nn::Graph graph;
  Ctx ctx{graph, /*train=*/true, model_.config().dropout, &drop_rng};

  std::vector<Tensor> losses;
  for (int i = 0; i < batch.size(); ++i) {
    const auto it = label_to_token_.find(batch.dialects[i]);
    if (it == label_to_token_.end()) {
      throw DataError("UnknownDialectLabel",
                      "utterance " + batch.ids[i] + " has dialect '" +
                          batch.dialects[i] + "' outside the label set");
    }
    const Eigen::VectorXd wave =
        batch.waves.row(i).head(batch.wave_lengths[i]);
    const Tensor encoded =
        model_.Encoder(ctx, model_.SpeechEncoderPrenet(ctx, wave));
    const Tensor hidden = model_.Decoder(
        ctx, model_.TextDecoderPrenet(ctx, {text::Tokenizer::kBos}), encoded);
    const Tensor logits = model_.TextDecoderPostnet(ctx, hidden);
    losses.push_back(nn::NllLoss(nn::LogSoftmaxRows(logits), {it->second}));
  }
  if (losses.empty()) throw DataError("EmptyCorpus", "empty DID batch");
  Tensor total = losses[0];
  for (std::size_t i = 1; i < losses.size(); ++i) total = nn::Add(total, losses[i]);
  total = nn::MulScalar(total, 1.0 / losses.size());
  if (!std::isfinite(total.scalar())) {
    throw NumericError("NonFiniteLoss",
                       "DID loss is not finite at step " + std::to_string(step));
  }
  graph.Backward(total);
  optimizer_.Step();
  return total.scalar();
}

DialectPrediction DidFinetuner::Classify(const Eigen::VectorXd& wave) const {
  nn::Graph graph;
  Ctx ctx{graph};
  const Tensor encoded =
      model_.Encoder(ctx, model_.SpeechEncoderPrenet(ctx, wave));
  const Tensor hidden = model_.Decoder(
      ctx, model_.TextDecoderPrenet(ctx, {text::Tokenizer::kBos}), encoded);
  const Tensor logits = model_.TextDecoderPostnet(ctx, hidden);

  // Softmax restricted to the dialect tokens: the regular-classifier view
  // of first-step decoding.
  Eigen::VectorXd scores(token_ids_.size());
  for (std::size_t k = 0; k < token_ids_.size(); ++k) {
    scores[k] = logits.value()(0, token_ids_[k]);
  }
  const double m = scores.maxCoeff();
  Eigen::VectorXd posterior = (scores.array() - m).exp();
  posterior /= posterior.sum();

  DialectPrediction pred;
  int best;
  posterior.maxCoeff(&best);
  pred.label = labels_[best];
  pred.posterior = posterior;
  return pred;
}

}  // namespace sawt::train
