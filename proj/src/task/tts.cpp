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

#include "sawt/task/tts.h"

#include <cmath>

#include "sawt/util/error.h"

namespace sawt::task {

using model::SpeechTextModel;
using nn::Ctx;
using nn::Mat;
using nn::Tensor;

SynthesisResult Synthesize(const SpeechTextModel& model,
                           const std::vector<int>& text_ids, int max_frames,
                           double stop_threshold, int speaker) {
  if (text_ids.empty()) throw DataError("InvalidArgument", "empty text input");
  if (max_frames < 1) throw DataError("InvalidArgument", "max_frames must be >= 1");

  // Encoder states are fixed for the whole generation; reuse the values.
  Mat memory;
  {
    nn::Graph graph;
    Ctx ctx{graph};
    memory = model.Encoder(ctx, model.TextEncoderPrenet(ctx, text_ids)).value();
  }

  const int mel_bins = model.config().mel_bins;
  SynthesisResult result;
  Mat generated(0, mel_bins);  // pre-postnet frames fed back in
  bool stopped = false;
  while (result.frames < max_frames) {
    const int t = result.frames;
    Mat dec_input = Mat::Zero(t + 1, mel_bins);
    if (t > 0) dec_input.bottomRows(t) = generated;

    nn::Graph graph;
    Ctx ctx{graph};
    const Tensor hidden =
        model.Decoder(ctx, model.SpeechDecoderPrenet(ctx, dec_input, speaker),
                      graph.Constant(memory));
    const auto post = model.SpeechDecoderPostnet(ctx, hidden);

    generated.conservativeResize(t + 1, mel_bins);
    generated.row(t) = post.mel_before.value().row(t);
    ++result.frames;

    const double stop_prob =
        1.0 / (1.0 + std::exp(-post.stop_logits.value()(t, 0)));
    result.stop_probs.push_back(stop_prob);
    if (stop_prob > stop_threshold) {
      stopped = true;
      break;
    }
  }
  result.max_frames_reached = !stopped;

  // Refine the full sequence once with the convolutional postnet.
  nn::Graph graph;
  Ctx ctx{graph};
  const Tensor before = graph.Constant(generated);
  result.mel = (before.value() + model.PostnetResidual(ctx, before).value());
  return result;
}

}  // namespace sawt::task
