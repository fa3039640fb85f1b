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

#ifndef SAWT_NN_ADAM_H_
#define SAWT_NN_ADAM_H_

#include <string>
#include <vector>

#include "sawt/nn/layers.h"

namespace sawt::nn {

enum class LrSchedule {
  kInverseSqrt,  // linear warmup then inverse-square-root decay
  kConstant,     // linear warmup then flat
};

struct AdamConfig {
  double lr = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double eps = 1e-8;
  double clip_norm = 0.0;   // 0 disables clipping
  int warmup_updates = 64000;
  LrSchedule schedule = LrSchedule::kInverseSqrt;
};

double ScheduledLr(const AdamConfig& config, int step);

class AdamOptimizer {
 public:
  AdamOptimizer() = default;
  AdamOptimizer(ParamStore& params, AdamConfig config);

  // One update from the accumulated gradients; zeroes them afterwards.
  // Returns the learning rate that was applied.
  double Step();

  int step_count() const { return step_; }
  void set_step_count(int step) { step_ = step; }

  // Parameters whose names start with any of these prefixes are not
  // updated (an empty prefix freezes everything).
  void SetFrozenPrefixes(std::vector<std::string> prefixes);

  void SaveState(const std::string& path) const;
  void LoadState(const std::string& path);

 private:
  bool Frozen(const std::string& name) const;

  ParamStore* params_ = nullptr;
  AdamConfig config_;
  std::vector<Mat> m_, v_;
  std::vector<std::string> frozen_prefixes_;
  int step_ = 0;
};

}  // namespace sawt::nn

#endif  // SAWT_NN_ADAM_H_
