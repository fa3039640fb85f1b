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

#ifndef SAWT_TASK_CTC_H_
#define SAWT_TASK_CTC_H_

#include <optional>
#include <vector>

#include "sawt/nn/tensor.h"
#include "sawt/task/lm.h"

namespace sawt::task {

// -log P(target | inputs) summed over all monotonic blank alignments,
// computed with the forward algorithm in log space. `log_probs` must be
// log-softmaxed, one row per frame. An infeasible target (too long after
// the collapse rule) yields +inf with a warning and a zero gradient.
// input_length < 0 uses all rows.
nn::Tensor CtcLoss(const nn::Tensor& log_probs, const std::vector<int>& target,
                   int blank, int input_length = -1);

// Plain-value variant for decoding and oracles.
double CtcLossValue(const nn::Mat& log_probs, const std::vector<int>& target,
                    int blank);

struct Hypothesis {
  std::vector<int> ids;
  double score = 0.0;     // acoustic + lambda * lm + length_bonus * |ids|
  double acoustic = 0.0;  // log P_ctc of the collapsed output
  double lm = 0.0;        // LM log-probability (0 when no LM is attached)
};

// Argmax per frame, collapse repeats, drop blanks.
Hypothesis CtcGreedyDecode(const nn::Mat& log_probs, int blank);

struct BeamConfig {
  int width = 5;
  double lm_weight = 0.3;   // lambda; only applied when an LM is attached
  double length_bonus = 0.0;
};

// Prefix beam search over collapsed outputs with optional shallow fusion:
// score = log P_ctc + lambda * log P_lm + length_bonus * |y|. With
// lm == nullptr (or lambda == 0) the ranking reduces to plain CTC search.
Hypothesis CtcBeamSearch(const nn::Mat& log_probs, int blank,
                         const BeamConfig& config, const CharLM* lm = nullptr);

}  // namespace sawt::task

#endif  // SAWT_TASK_CTC_H_
