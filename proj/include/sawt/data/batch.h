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

#ifndef SAWT_DATA_BATCH_H_
#define SAWT_DATA_BATCH_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sawt/data/manifest.h"
#include "sawt/text/tokenizer.h"

namespace sawt::data {

enum class Modality { kSpeech, kText, kPaired };

// Padded batch. Speech rows are zero-padded waveforms, text rows are
// pad-id-padded token sequences; true lengths sit alongside.
struct Batch {
  Modality modality = Modality::kSpeech;
  std::vector<std::string> ids;
  Eigen::MatrixXd waves;  // B x L_max (speech / paired)
  std::vector<int> wave_lengths;
  std::vector<std::vector<int>> tokens;  // B rows, padded to T_max
  std::vector<int> token_lengths;
  std::vector<std::string> dialects;  // "" when absent

  int size() const { return static_cast<int>(ids.size()); }
};

struct BatchConfig {
  // Hard caps; items over either cap are skipped with a logged message.
  long max_speech_samples = 250000;
  int max_text_chars = 600;
  // Padded-size budgets per batch: batch_rows * padded_len <= budget.
  long speech_budget = 160000;
  long text_budget = 2400;
};

// Assembles one batch from explicit utterances (no budget logic).
Batch CollateBatch(const std::vector<const Utterance*>& utts,
                   const text::Tokenizer& tokenizer, Modality modality);

// Length-bucketed, budget-capped epoch iterator. For a fixed seed the
// delivered order is a pure function of (seed, epoch); every eligible
// utterance appears exactly once per epoch.
class BatchIterator {
 public:
  BatchIterator(std::vector<Utterance> utterances, text::Tokenizer tokenizer,
                Modality modality, BatchConfig config, std::uint64_t seed);

  Batch Next();  // wraps to the next epoch automatically

  int epoch() const { return epoch_; }
  std::size_t batches_per_epoch() const { return plan_.size(); }
  const std::vector<std::string>& skipped_ids() const { return skipped_; }

 private:
  void PlanEpoch();
  long SpeechLength(const Utterance& u) const;
  long TextLength(const Utterance& u) const;

  std::vector<Utterance> utterances_;
  text::Tokenizer tokenizer_;
  Modality modality_;
  BatchConfig config_;
  std::uint64_t seed_;
  std::vector<std::size_t> eligible_;
  std::vector<std::string> skipped_;
  std::vector<std::vector<std::size_t>> plan_;  // batches of utterance indices
  int epoch_ = -1;
  std::size_t cursor_ = 0;
};

}  // namespace sawt::data

#endif  // SAWT_DATA_BATCH_H_
