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

#ifndef SAWT_MODEL_CHECKPOINT_H_
#define SAWT_MODEL_CHECKPOINT_H_

#include <string>

#include "sawt/model/config.h"
#include "sawt/nn/layers.h"

namespace sawt::model {

constexpr int kCheckpointVersion = 1;

// Single-archive checkpoint: versioned header, JSON config + metadata, then
// named float64 arrays (rows, cols, row-major little-endian).
void SaveCheckpoint(const std::string& path, const ModelConfig& config,
                    const nn::ParamStore& params,
                    const std::string& meta_json = "{}");

struct LoadOptions {
  // Allow checkpoint arrays with no matching parameter (task heads added or
  // removed between pre-training and fine-tuning).
  bool allow_extra = false;
  // Allow parameters with no checkpoint array (freshly added heads).
  bool allow_missing = false;
  // When a parameter is larger than the stored array along exactly one axis
  // (rows with equal cols, or cols with equal rows), load the stored block
  // and keep the fresh initialization for the rest; used when the
  // vocabulary is extended before fine-tuning.
  bool grow_dims = false;
};

struct CheckpointInfo {
  ModelConfig config;
  std::string meta_json;
};

CheckpointInfo LoadCheckpoint(const std::string& path, nn::ParamStore& params,
                              const LoadOptions& options = {});

// Reads only the header (config + metadata).
CheckpointInfo PeekCheckpoint(const std::string& path);

}  // namespace sawt::model

#endif  // SAWT_MODEL_CHECKPOINT_H_
