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

#include "sawt/data/batch.h"

#include <algorithm>
#include <iostream>

#include "sawt/audio/wave.h"
#include "sawt/util/error.h"
#include "sawt/util/rng.h"
#include "sawt/util/utf8.h"

namespace sawt::data {

namespace {

bool WantsSpeech(Modality m) { return m != Modality::kText; }
bool WantsText(Modality m) { return m != Modality::kSpeech; }

}  // namespace

Batch CollateBatch(const std::vector<const Utterance*>& utts,
                   const text::Tokenizer& tokenizer, Modality modality) {
  Batch batch;
  batch.modality = modality;
  const int b = static_cast<int>(utts.size());
  for (const auto* u : utts) {
    batch.ids.push_back(u->id);
    batch.dialects.push_back(u->dialect.value_or(""));
  }

  if (WantsSpeech(modality)) {
    std::vector<audio::Waveform> waves;
    waves.reserve(b);
    std::size_t max_len = 0;
    for (const auto* u : utts) {
      waves.push_back(audio::LoadWave(u->audio_path));
      max_len = std::max(max_len, waves.back().samples.size());
    }
    batch.waves = Eigen::MatrixXd::Zero(b, static_cast<Eigen::Index>(max_len));
    for (int i = 0; i < b; ++i) {
      const auto& s = waves[i].samples;
      batch.wave_lengths.push_back(static_cast<int>(s.size()));
      for (std::size_t j = 0; j < s.size(); ++j) batch.waves(i, j) = s[j];
    }
  }

  if (WantsText(modality)) {
    std::size_t max_len = 0;
    std::vector<std::vector<int>> rows;
    rows.reserve(b);
    for (const auto* u : utts) {
      rows.push_back(tokenizer.Encode(u->text_norm, /*allow_unk=*/false));
      max_len = std::max(max_len, rows.back().size());
    }
    for (auto& row : rows) {
      batch.token_lengths.push_back(static_cast<int>(row.size()));
      row.resize(max_len, text::Tokenizer::kPad);
      batch.tokens.push_back(std::move(row));
    }
  }
  return batch;
}

BatchIterator::BatchIterator(std::vector<Utterance> utterances,
                             text::Tokenizer tokenizer, Modality modality,
                             BatchConfig config, std::uint64_t seed)
    : utterances_(std::move(utterances)),
      tokenizer_(std::move(tokenizer)),
      modality_(modality),
      config_(config),
      seed_(seed) {
  for (std::size_t i = 0; i < utterances_.size(); ++i) {
    const auto& u = utterances_[i];
    const bool over_speech =
        WantsSpeech(modality_) && SpeechLength(u) > config_.max_speech_samples;
    const bool over_text =
        WantsText(modality_) && TextLength(u) > config_.max_text_chars;
    if (over_speech || over_text) {
      skipped_.push_back(u.id);
      std::clog << "batch: skipping over-cap utterance " << u.id
                << (over_speech ? " (speech length)" : " (text length)")
                << '\n';
      continue;
    }
    eligible_.push_back(i);
  }
}

long BatchIterator::SpeechLength(const Utterance& u) const {
  return static_cast<long>(u.duration * audio::kSampleRate + 0.5);
}

long BatchIterator::TextLength(const Utterance& u) const {
  return static_cast<long>(util::Utf8Decode(u.text_norm).size());
}

void BatchIterator::PlanEpoch() {
  ++epoch_;
  cursor_ = 0;
  plan_.clear();
  if (eligible_.empty()) {
    throw DataError("EmptyCorpus", "no eligible utterances to batch");
  }

  util::Rng rng(util::Rng::mix(seed_, static_cast<std::uint64_t>(epoch_)));
  std::vector<std::size_t> order = eligible_;
  rng.shuffle(order);
  // Stable sort on length only: the shuffle decides how equal lengths tie.
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     const auto la = WantsSpeech(modality_)
                                         ? SpeechLength(utterances_[a])
                                         : TextLength(utterances_[a]);
                     const auto lb = WantsSpeech(modality_)
                                         ? SpeechLength(utterances_[b])
                                         : TextLength(utterances_[b]);
                     return la < lb;
                   });

  std::vector<std::size_t> current;
  long max_speech = 0, max_text = 0;
  auto flush = [&] {
    if (!current.empty()) plan_.push_back(std::move(current));
    current = {};
    max_speech = max_text = 0;
  };
  for (const std::size_t idx : order) {
    const auto& u = utterances_[idx];
    const long s_len = WantsSpeech(modality_) ? SpeechLength(u) : 0;
    const long t_len = WantsText(modality_) ? TextLength(u) : 0;
    const long new_speech = std::max(max_speech, s_len);
    const long new_text = std::max(max_text, t_len);
    const long n = static_cast<long>(current.size()) + 1;
    const bool fits =
        (!WantsSpeech(modality_) || n * new_speech <= config_.speech_budget) &&
        (!WantsText(modality_) || n * new_text <= config_.text_budget);
    if (!fits && !current.empty()) flush();
    current.push_back(idx);
    max_speech = std::max(max_speech, s_len);
    max_text = std::max(max_text, t_len);
  }
  flush();
  rng.shuffle(plan_);
}

Batch BatchIterator::Next() {
  if (epoch_ < 0 || cursor_ >= plan_.size()) PlanEpoch();
  const auto& indices = plan_[cursor_++];
  std::vector<const Utterance*> utts;
  utts.reserve(indices.size());
  for (const std::size_t i : indices) utts.push_back(&utterances_[i]);
  return CollateBatch(utts, tokenizer_, modality_);
}

}  // namespace sawt::data
