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

#ifndef SAWT_MODEL_CONFIG_H_
#define SAWT_MODEL_CONFIG_H_

#include <string>
#include <vector>

namespace sawt::model {

// Every architectural dimension in one place. The `toy` preset trains on a
// laptop in minutes; the `paper` preset mirrors a full-scale deployment and
// exists for configuration and parameter-count sanity only.
struct ModelConfig {
  int d_model = 64;
  int n_heads = 2;
  int enc_layers = 2;
  int dec_layers = 2;
  int ffn_dim = 128;
  double dropout = 0.0;
  int vocab_size = 64;
  int mel_bins = 80;
  int unit_count = 16;  // discrete-unit label space (k-means K)
  int span_len = 10;    // masked span length in pre-net frames
  double mix_prob = 0.10;
  std::vector<int> conv_kernels = {10, 3, 3, 3, 3, 2, 2};
  std::vector<int> conv_strides = {5, 2, 2, 2, 2, 2, 2};
  int conv_channels = 32;
  int codebook_groups = 2;    // G
  int codebook_entries = 100; // V per group
  int reduction_factor = 1;
  int dec_prenet_hidden = 64;
  int postnet_channels = 64;
  int postnet_layers = 3;
  int postnet_kernel = 5;
  int n_speakers = 1;

  int stride_product() const {
    int p = 1;
    for (const int s : conv_strides) p *= s;
    return p;
  }

  void Validate() const;

  std::string ToJson() const;
  static ModelConfig FromJson(const std::string& json_text);

  static ModelConfig Toy(int vocab_size);
  static ModelConfig Paper(int vocab_size = 130);
  static ModelConfig Preset(const std::string& name, int vocab_size);
};

}  // namespace sawt::model

#endif  // SAWT_MODEL_CONFIG_H_
