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

#ifndef SAWT_AUDIO_MASK_H_
#define SAWT_AUDIO_MASK_H_

#include <cstdint>
#include <utility>
#include <vector>

#include "sawt/util/rng.h"

namespace sawt::audio {

// Masked frame intervals for one utterance. Spans are sorted, disjoint, and
// each at most span_len long; contiguous masked runs longer than span_len
// are stored as chained spans.
struct MaskSpec {
  std::vector<std::pair<int, int>> spans;  // (start, length)
  int total_frames = 0;

  int masked_count() const {
    int n = 0;
    for (const auto& [s, l] : spans) n += l;
    return n;
  }
  std::vector<std::uint8_t> bitmap() const;
  std::vector<int> indices() const;
};

// Every frame independently starts a span with probability start_prob; a
// start at i masks [i, i + span_len) clipped to the sequence end, and
// overlapping spans merge.
MaskSpec SampleMaskSpans(int total_frames, int span_len, double start_prob,
                         util::Rng& rng);

}  // namespace sawt::audio

#endif  // SAWT_AUDIO_MASK_H_
