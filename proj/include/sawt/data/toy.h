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

#ifndef SAWT_DATA_TOY_H_
#define SAWT_DATA_TOY_H_

#include <cstdint>
#include <string>
#include <vector>

#include "sawt/data/manifest.h"

namespace sawt::data {

// Synthetic corpus where transcripts are exactly recoverable from audio:
// each character renders as a 100 ms pure tone at a character-specific
// frequency, and each dialect adds a constant low-amplitude marker tone in
// a reserved high band. Everything is a deterministic function of the seed.
struct ToyCorpusConfig {
  std::uint64_t seed = 0;
  int n_utterances = 20;
  std::string alphabet = "ابتجدهوز"
                         "حطيك";  // 12 Arabic letters
  int n_dialects = 0;  // 0 disables dialect labels and marker tones
  int min_chars = 3;
  int max_chars = 6;
  std::string id_prefix = "toy";
};

constexpr double kToyCharSeconds = 0.10;
constexpr double kToyCharBaseHz = 500.0;
constexpr double kToyCharStepHz = 250.0;
constexpr double kToyCharAmplitude = 0.30;
constexpr double kToyDialectBaseHz = 6200.0;
constexpr double kToyDialectStepHz = 450.0;
constexpr double kToyDialectAmplitude = 0.08;

// Character frequency by alphabet index (injective).
double ToyCharFrequency(int alphabet_index);
double ToyDialectFrequency(int dialect_index);

// Renders audio for one transcript (characters must be in `alphabet`).
std::vector<double> RenderToyAudio(const std::string& text,
                                   const std::string& alphabet, int dialect);

// Writes WAVs under <out_dir>/wav/ and a manifest at
// <out_dir>/manifest.jsonl; returns the loaded utterances.
std::vector<Utterance> MakeToyCorpus(const ToyCorpusConfig& cfg,
                                     const std::string& out_dir);

}  // namespace sawt::data

#endif  // SAWT_DATA_TOY_H_
