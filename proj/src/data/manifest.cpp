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

#include "sawt/data/manifest.h"

#include <filesystem>
#include <fstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "sawt/text/normalize.h"
#include "sawt/util/error.h"

namespace sawt::data {

using nlohmann::json;

std::vector<Utterance> LoadManifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("FileNotFound", "cannot open manifest " + path);
  const std::filesystem::path dir = std::filesystem::path(path).parent_path();

  std::vector<Utterance> utts;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError("ParseError", "manifest line " + std::to_string(lineno) +
                                        ": " + e.what());
    }
    Utterance u;
    try {
      u.id = j.at("id").get<std::string>();
      u.audio = j.at("audio").get<std::string>();
      u.duration = j.at("duration").get<double>();
      u.text_raw = j.at("text").get<std::string>();
      if (j.contains("dialect") && !j["dialect"].is_null()) {
        u.dialect = j["dialect"].get<std::string>();
      }
      if (j.contains("overlap")) u.overlap = j["overlap"].get<bool>();
    } catch (const json::exception& e) {
      throw DataError("ParseError", "manifest line " + std::to_string(lineno) +
                                        ": " + e.what());
    }
    if (u.duration <= 0.0) {
      throw DataError("ParseError", "manifest line " + std::to_string(lineno) +
                                        ": duration must be > 0");
    }
    if (!ids.insert(u.id).second) {
      throw DataError("DuplicateId", "manifest line " + std::to_string(lineno) +
                                         ": id '" + u.id + "' repeats");
    }
    u.text_norm = text::NormalizeText(u.text_raw);
    const std::filesystem::path audio_path(u.audio);
    u.audio_path =
        audio_path.is_absolute() ? u.audio : (dir / audio_path).string();
    utts.push_back(std::move(u));
  }
  return utts;
}

void SaveManifest(const std::string& path,
                  const std::vector<Utterance>& utterances) {
  std::ofstream out(path);
  if (!out) throw DataError("FileNotFound", "cannot write manifest " + path);
  for (const auto& u : utterances) {
    json j;
    j["id"] = u.id;
    j["audio"] = u.audio;
    j["duration"] = u.duration;
    j["text"] = u.text_raw;
    if (u.dialect) j["dialect"] = *u.dialect;
    if (u.overlap) j["overlap"] = true;
    out << j.dump() << '\n';
  }
}

std::vector<Utterance> FilterCorpus(const std::vector<Utterance>& utterances,
                                    double max_duration, bool drop_overlap) {
  std::vector<Utterance> kept;
  kept.reserve(utterances.size());
  for (const auto& u : utterances) {
    if (u.duration > max_duration) continue;
    if (drop_overlap && u.overlap) continue;
    kept.push_back(u);
  }
  return kept;
}

}  // namespace sawt::data
