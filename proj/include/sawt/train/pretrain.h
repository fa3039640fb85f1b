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

#ifndef SAWT_TRAIN_PRETRAIN_H_
#define SAWT_TRAIN_PRETRAIN_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sawt/audio/kmeans.h"
#include "sawt/audio/mask.h"
#include "sawt/data/batch.h"
#include "sawt/model/model.h"
#include "sawt/nn/adam.h"

namespace sawt::train {

struct TrainConfig {
  double lr = 2e-4;
  int warmup_updates = 64000;
  int max_updates = 200000;
  double beta1 = 0.9, beta2 = 0.98, adam_eps = 1e-8;
  double clip_norm = 0.0;

  double w_mlm = 1.0;
  double w_sdae = 1.0;
  double w_tdae = 1.0;
  double w_div = 1.0;

  double mask_start_prob = 0.065;
  double text_corrupt_rate = 0.30;
  double text_corrupt_mean_span = 3.0;
  double stop_pos_weight = 5.0;

  double quant_temp_start = 1.0;
  double quant_temp_min = 0.5;
  double quant_temp_decay = 0.9995;

  std::uint64_t seed = 1;
  int log_every = 1;
  int checkpoint_every = 500;

  double QuantTemperature(int step) const;
  std::string ToJson() const;
  static TrainConfig FromJson(const std::string& json_text);
  static TrainConfig Toy();
};

struct LossReport {
  double speech_mlm = 0.0;
  double speech_dae = 0.0;
  double text_dae = 0.0;
  double diversity = 0.0;
  double total = 0.0;
  int masked_frames = 0;
  int codes_replaced = 0;
  int step = 0;
  double lr = 0.0;

  std::string ToJsonLine() const;
};

// ---- individual objectives (pure given their explicit inputs) ----

// Mean cross-entropy over masked frames; unit_logits rows beyond the label
// range are ignored. An empty mask yields 0 with count 0.
nn::Tensor SpeechMlmLoss(const nn::Tensor& unit_logits,
                         const std::vector<int>& labels,
                         const audio::MaskSpec& mask,
                         int* masked_count = nullptr);

// Mel reconstruction terms shared by the speech denoising objective and TTS
// fine-tuning: per-frame L1 before/after the postnet plus a stop-token BCE
// whose positive class is the final valid frame.
struct MelLossParts {
  nn::Tensor l1_before;
  nn::Tensor l1_after;
  nn::Tensor stop_bce;
};
MelLossParts MelReconLoss(const model::SpeechTextModel::SpeechPostnetOut& out,
                          const nn::Mat& target_mel, int valid_frames,
                          double stop_pos_weight);

// L1 of mel_before and mel_after against the target over the first
// valid_frames rows, plus a weighted stop-token BCE whose positive class is
// the final valid frame.
nn::Tensor SpeechDaeLoss(const model::SpeechTextModel::SpeechPostnetOut& out,
                         const nn::Mat& target_mel, int valid_frames,
                         double stop_pos_weight);

struct CorruptedText {
  std::vector<int> corrupted;
  int masked = 0;
};
// Replaces contiguous spans (Poisson mean span length) with the mask symbol
// until round(rate * len) positions are covered; deterministic per rng.
CorruptedText CorruptText(const std::vector<int>& ids, double rate,
                          double mean_span, util::Rng& rng,
                          int mask_id = text::Tokenizer::kMask);

// Token-level cross-entropy of the original sequence; logits row count must
// equal the target length.
nn::Tensor TextDaeLoss(const nn::Tensor& decoder_logits,
                       const std::vector<int>& original_ids);

struct MixResult {
  nn::Tensor mixed;  // same shape as the input states
  std::vector<nn::Tensor> soft_probs;  // per group, T x V
  int replaced = 0;
  int total = 0;
};
// Independently replaces each position with its quantized vector with
// probability mix_prob.
MixResult MixQuantized(nn::Ctx& ctx, const model::SpeechTextModel& model,
                       const nn::Tensor& states, double mix_prob,
                       double temperature, util::Rng& rng);

// (V - exp H(p_g)) / (G*V) summed over groups; usage rows must sum to 1
// within 1e-6 (NonDistribution otherwise).
nn::Tensor DiversityLoss(const nn::Tensor& usage);

// ---- the joint step ----

class Pretrainer {
 public:
  Pretrainer(model::SpeechTextModel& model, audio::ClusterModel units,
             TrainConfig config, audio::MelConfig mel_config = {});

  LossReport Step(const data::Batch& speech_batch, const data::Batch& text_batch);

  nn::AdamOptimizer& optimizer() { return optimizer_; }
  int step_count() const { return optimizer_.step_count(); }
  const audio::ClusterModel& units() const { return units_; }
  const audio::MelConfig& mel_config() const { return mel_config_; }
  const TrainConfig& config() const { return config_; }

  // Mel features and unit labels for one utterance, cached by id.
  struct Features {
    nn::Mat mel;
    std::vector<int> labels;
  };
  const Features& FeaturesFor(const std::string& id,
                              const Eigen::VectorXd& wave);

 private:
  model::SpeechTextModel& model_;
  audio::ClusterModel units_;
  TrainConfig config_;
  audio::MelConfig mel_config_;
  nn::AdamOptimizer optimizer_;
  std::map<std::string, Features> cache_;
};

}  // namespace sawt::train

#endif  // SAWT_TRAIN_PRETRAIN_H_
