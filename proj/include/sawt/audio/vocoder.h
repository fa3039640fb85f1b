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

#ifndef SAWT_AUDIO_VOCODER_H_
#define SAWT_AUDIO_VOCODER_H_

#include "sawt/audio/mel.h"
#include "sawt/audio/wave.h"

namespace sawt::audio {

// Mel -> waveform. Neural vocoders can be loaded behind this interface; the
// built-in implementation is classical iterative phase reconstruction.
class Vocoder {
 public:
  virtual ~Vocoder() = default;
  virtual Waveform Vocode(const MelSpectrogram& mel) const = 0;
};

class GriffinLimVocoder : public Vocoder {
 public:
  explicit GriffinLimVocoder(MelConfig config = {}, int iterations = 64)
      : config_(config), iterations_(iterations) {}

  Waveform Vocode(const MelSpectrogram& mel) const override;

 private:
  MelConfig config_;
  int iterations_;
};

}  // namespace sawt::audio

#endif  // SAWT_AUDIO_VOCODER_H_
