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

#ifndef SAWT_AUDIO_WAVE_H_
#define SAWT_AUDIO_WAVE_H_

#include <string>
#include <vector>

namespace sawt::audio {

constexpr int kSampleRate = 16000;

// Mono waveform, samples in [-1, 1], fixed 16 kHz rate.
struct Waveform {
  std::vector<double> samples;
  int rate = kSampleRate;

  double duration() const {
    return static_cast<double>(samples.size()) / rate;
  }
};

// Reads a 16-bit PCM WAV file. Multi-channel audio is averaged to mono.
// A file at another rate raises RateMismatch unless `resample` is set, in
// which case it is linearly resampled to 16 kHz.
Waveform LoadWave(const std::string& path, bool resample = false);

// Writes 16-bit PCM mono at 16 kHz; samples are clamped to [-1, 1].
void SaveWave(const std::string& path, const Waveform& wave);

}  // namespace sawt::audio

#endif  // SAWT_AUDIO_WAVE_H_
