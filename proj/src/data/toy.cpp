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

#include "sawt/data/toy.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>

#include "sawt/audio/wave.h"
#include "sawt/util/error.h"
#include "sawt/util/rng.h"
#include "sawt/util/utf8.h"

namespace sawt::data {

namespace fs = std::filesystem;

double ToyCharFrequency(int alphabet_index) {
  return kToyCharBaseHz + kToyCharStepHz * alphabet_index;
}

double ToyDialectFrequency(int dialect_index) {
  return kToyDialectBaseHz + kToyDialectStepHz * dialect_index;
}

std::vector<double> RenderToyAudio(const std::string& text,
                                   const std::string& alphabet, int dialect) {
  const auto alpha_cps = util::Utf8Decode(alphabet);
  std::map<char32_t, int> index;
  for (std::size_t i = 0; i < alpha_cps.size(); ++i) {
    index[alpha_cps[i]] = static_cast<int>(i);
  }
  if (!alpha_cps.empty() &&
      ToyCharFrequency(static_cast<int>(alpha_cps.size()) - 1) >=
          kToyDialectBaseHz - 2.0 * kToyCharStepHz) {
    throw DataError("InvalidArgument",
                    "alphabet too large: character band would collide with "
                    "the dialect marker band");
  }

  const auto cps = util::Utf8Decode(text);
  const int rate = audio::kSampleRate;
  const int char_samples = static_cast<int>(kToyCharSeconds * rate + 0.5);
  const int ramp = rate / 100;  // 10 ms fade against clicks
  std::vector<double> samples(cps.size() * char_samples, 0.0);

  for (std::size_t c = 0; c < cps.size(); ++c) {
    const auto it = index.find(cps[c]);
    if (it == index.end()) {
      throw DataError("UnknownSymbol",
                      "toy text character not in alphabet: " +
                          util::Utf8Encode(cps[c]));
    }
    const double freq = ToyCharFrequency(it->second);
    for (int i = 0; i < char_samples; ++i) {
      double env = 1.0;
      if (i < ramp) env = static_cast<double>(i) / ramp;
      if (char_samples - 1 - i < ramp) {
        env = std::min(env, static_cast<double>(char_samples - 1 - i) / ramp);
      }
      samples[c * char_samples + i] =
          kToyCharAmplitude * env * std::sin(2.0 * M_PI * freq * i / rate);
    }
  }
  if (dialect >= 0) {
    const double freq = ToyDialectFrequency(dialect);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      samples[i] += kToyDialectAmplitude * std::sin(2.0 * M_PI * freq * i / rate);
    }
  }
  return samples;
}

std::vector<Utterance> MakeToyCorpus(const ToyCorpusConfig& cfg,
                                     const std::string& out_dir) {
  if (cfg.n_utterances < 1) {
    throw DataError("InvalidArgument", "need at least one utterance");
  }
  const auto alpha_cps = util::Utf8Decode(cfg.alphabet);
  if (alpha_cps.empty()) {
    throw DataError("InvalidArgument", "toy alphabet is empty");
  }

  fs::create_directories(fs::path(out_dir) / "wav");
  util::Rng rng(cfg.seed);
  util::Rng text_rng = rng.child("text");

  std::vector<Utterance> utts;
  utts.reserve(cfg.n_utterances);
  for (int i = 0; i < cfg.n_utterances; ++i) {
    const int len = text_rng.uniform_int(cfg.min_chars, cfg.max_chars);
    std::string text;
    for (int c = 0; c < len; ++c) {
      text += util::Utf8Encode(
          alpha_cps[text_rng.uniform_int(alpha_cps.size())]);
    }
    const int dialect = cfg.n_dialects > 0 ? i % cfg.n_dialects : -1;

    char id_buf[64];
    std::snprintf(id_buf, sizeof(id_buf), "%s_%04d", cfg.id_prefix.c_str(), i);
    const std::string rel_wav = std::string("wav/") + id_buf + ".wav";

    const auto samples = RenderToyAudio(text, cfg.alphabet, dialect);
    audio::SaveWave((fs::path(out_dir) / rel_wav).string(),
                    audio::Waveform{samples});

    Utterance u;
    u.id = id_buf;
    u.audio = rel_wav;
    u.duration = static_cast<double>(samples.size()) / audio::kSampleRate;
    u.text_raw = text;
    if (dialect >= 0) u.dialect = "d" + std::to_string(dialect);
    utts.push_back(std::move(u));
  }

  const std::string manifest_path =
      (fs::path(out_dir) / "manifest.jsonl").string();
  SaveManifest(manifest_path, utts);
  return LoadManifest(manifest_path);
}

}  // namespace sawt::data
