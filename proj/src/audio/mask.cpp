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

#include "sawt/audio/mask.h"

#include <algorithm>

#include "sawt/util/error.h"

namespace sawt::audio {

std::vector<std::uint8_t> MaskSpec::bitmap() const {
  std::vector<std::uint8_t> map(total_frames, 0);
  for (const auto& [start, len] : spans) {
    for (int i = start; i < start + len; ++i) map[i] = 1;
  }
  return map;
}

std::vector<int> MaskSpec::indices() const {
  std::vector<int> idx;
  idx.reserve(masked_count());
  for (const auto& [start, len] : spans) {
    for (int i = start; i < start + len; ++i) idx.push_back(i);
  }
  return idx;
}

MaskSpec SampleMaskSpans(int total_frames, int span_len, double start_prob,
                         util::Rng& rng) {
  if (total_frames < 1) {
    throw DataError("InvalidArgument", "total_frames must be >= 1");
  }
  if (start_prob < 0.0 || start_prob > 1.0) {
    throw DataError("InvalidArgument", "start_prob must be in [0, 1]");
  }
  std::vector<std::uint8_t> masked(total_frames, 0);
  for (int i = 0; i < total_frames; ++i) {
    if (!rng.bernoulli(start_prob)) continue;
    const int end = std::min(total_frames, i + span_len);
    std::fill(masked.begin() + i, masked.begin() + end, std::uint8_t{1});
  }

  MaskSpec spec;
  spec.total_frames = total_frames;
  int i = 0;
  while (i < total_frames) {
    if (!masked[i]) {
      ++i;
      continue;
    }
    int j = i;
    while (j < total_frames && masked[j]) ++j;
    // Runs longer than span_len (merged overlaps) are chunked so every
    // stored span keeps length <= span_len.
    for (int s = i; s < j; s += span_len) {
      spec.spans.emplace_back(s, std::min(span_len, j - s));
    }
    i = j;
  }
  return spec;
}

}  // namespace sawt::audio
