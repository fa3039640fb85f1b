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

#ifndef SAWT_DATA_MANIFEST_H_
#define SAWT_DATA_MANIFEST_H_

#include <optional>
#include <string>
#include <vector>

namespace sawt::data {

// One manifest record. `audio` is stored as written in the manifest;
// `audio_path` resolves it against the manifest's directory.
struct Utterance {
  std::string id;
  std::string audio;
  std::string audio_path;
  double duration = 0.0;  // seconds
  std::string text_raw;
  std::string text_norm;
  std::optional<std::string> dialect;
  bool overlap = false;
};

// Reads a JSONL manifest: one object per line with fields id, audio,
// duration, text, and optional dialect / overlap. Normalized text is
// populated on load. Throws ParseError (with the line number) and
// DuplicateId.
std::vector<Utterance> LoadManifest(const std::string& path);

void SaveManifest(const std::string& path,
                  const std::vector<Utterance>& utterances);

// Drops utterances longer than max_duration (strictly greater) and, when
// drop_overlap is set, utterances flagged as overlapping speech. Order
// preserved; idempotent.
std::vector<Utterance> FilterCorpus(const std::vector<Utterance>& utterances,
                                    double max_duration = 40.0,
                                    bool drop_overlap = true);

}  // namespace sawt::data

#endif  // SAWT_DATA_MANIFEST_H_
