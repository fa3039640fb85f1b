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

#ifndef SAWT_TRAIN_FINETUNE_H_
#define SAWT_TRAIN_FINETUNE_H_

#include <map>
#include <string>
#include <vector>

#include "sawt/audio/mel.h"
#include "sawt/data/batch.h"
#include "sawt/model/model.h"
#include "sawt/nn/adam.h"

namespace sawt::train {

struct FinetuneConfig {
  double lr = 1e-3;
  int warmup_updates = 200;
  double beta1 = 0.9, beta2 = 0.98, adam_eps = 1e-8;
  double clip_norm = 5.0;

  // ASR: weight of the optional sequence-to-sequence cross-entropy through
  // the decoder, on top of the CTC objective (0 = CTC only).
  double joint_ce_weight = 0.0;

  // TTS.
  double stop_pos_weight = 5.0;
  double stop_loss_weight = 1.0;

  // Parameters whose names start with these prefixes are not updated.
  std::vector<std::string> freeze_prefixes;

  std::uint64_t seed = 1;

  std::string ToJson() const;
  static FinetuneConfig FromJson(const std::string& json_text);
};

// Speech -> text with CTC on the encoder (text post-net as the projection),
// optionally joined by decoder cross-entropy.
class AsrFinetuner {
 public:
  AsrFinetuner(model::SpeechTextModel& model, FinetuneConfig config);

  double Step(const data::Batch& paired_batch);

  // Eval-mode per-frame log-probabilities for decoding.
  nn::Mat CtcLogProbs(const Eigen::VectorXd& wave) const;

  nn::AdamOptimizer& optimizer() { return optimizer_; }

 private:
  model::SpeechTextModel& model_;
  FinetuneConfig config_;
  nn::AdamOptimizer optimizer_;
};

struct TtsStepReport {
  double total = 0.0;
  double l1_before = 0.0;
  double l1_after = 0.0;
  double stop_bce = 0.0;
};

// Text -> mel regression with stop prediction.
class TtsFinetuner {
 public:
  TtsFinetuner(model::SpeechTextModel& model, FinetuneConfig config,
               audio::MelConfig mel_config = {});

  TtsStepReport Step(const data::Batch& paired_batch);

  // Teacher-forced per-frame L1 of mel_after on one utterance (eval mode).
  double EvalFrameL1(const Eigen::VectorXd& wave, const std::vector<int>& ids);

  const nn::Mat& MelFor(const std::string& id, const Eigen::VectorXd& wave);
  nn::AdamOptimizer& optimizer() { return optimizer_; }

 private:
  model::SpeechTextModel& model_;
  FinetuneConfig config_;
  audio::MelConfig mel_config_;
  nn::AdamOptimizer optimizer_;
  std::map<std::string, nn::Mat> mel_cache_;
};

struct DialectPrediction {
  std::string label;
  Eigen::VectorXd posterior;  // over the label set, sums to 1
};

// Dialect ID as first-step decoding: the decoder, fed bos, predicts a
// dialect token appended to the tokenizer vocabulary.
class DidFinetuner {
 public:
  DidFinetuner(model::SpeechTextModel& model, FinetuneConfig config,
               std::map<std::string, int> label_to_token);

  double Step(const data::Batch& speech_batch);
  DialectPrediction Classify(const Eigen::VectorXd& wave) const;

  nn::AdamOptimizer& optimizer() { return optimizer_; }
  const std::vector<std::string>& labels() const { return labels_; }

  // The dialect-token symbol used in the extended tokenizer.
  static std::string TokenSymbol(const std::string& label) {
    return "<dialect:" + label + ">";
  }

 private:
  model::SpeechTextModel& model_;
  FinetuneConfig config_;
  std::map<std::string, int> label_to_token_;
  std::vector<std::string> labels_;
  std::vector<int> token_ids_;
  nn::AdamOptimizer optimizer_;
};

}  // namespace sawt::train

#endif  // SAWT_TRAIN_FINETUNE_H_
