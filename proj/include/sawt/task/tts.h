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

#ifndef SAWT_TASK_TTS_H_
#define SAWT_TASK_TTS_H_

#include <vector>

#include "sawt/model/model.h"

namespace sawt::task {

struct SynthesisResult {
  nn::Mat mel;      // frames x mel_bins, after the postnet refinement
  int frames = 0;
  bool max_frames_reached = false;
  std::vector<double> stop_probs;
};

// Autoregressive mel generation: the decoder consumes its own pre-postnet
// frames and halts once sigmoid(stop) exceeds the threshold (or at
// max_frames, reported with a flag). Deterministic in eval mode.
SynthesisResult Synthesize(const model::SpeechTextModel& model,
                           const std::vector<int>& text_ids, int max_frames,
                           double stop_threshold = 0.5, int speaker = 0);

}  // namespace sawt::task

#endif  // SAWT_TASK_TTS_H_
