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

#ifndef SAWT_TEXT_TOKENIZER_H_
#define SAWT_TEXT_TOKENIZER_H_

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace sawt::text {

// Character tokenizer with reserved special ids. Ids are contiguous from 0;
// regular symbols start after the specials. Extending a tokenizer never
// changes an existing id: new symbols are appended at the end.
class Tokenizer {
 public:
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;
  static constexpr int kUnk = 3;
  static constexpr int kBlank = 4;  // CTC blank
  static constexpr int kMask = 5;   // text denoising mask
  static constexpr int kNumSpecials = 6;

  Tokenizer() = default;

  // Builds from a corpus of normalized lines. Starts from `base` when given
  // (all base ids preserved); symbols found in the corpus but not in the
  // base are appended sorted by codepoint. Throws EmptyCorpus.
  static Tokenizer Build(const std::vector<std::string>& corpus,
                         const Tokenizer* base = nullptr);

  int vocab_size() const {
    return kNumSpecials + static_cast<int>(symbols_.size());
  }

  // Encodes codepoint per codepoint. Unknown symbols become kUnk when
  // allow_unk, otherwise raise UnknownSymbol.
  std::vector<int> Encode(const std::string& text, bool allow_unk = false) const;

  // Inverse of Encode on in-vocabulary text; special ids decode to nothing.
  // Raises InvalidId for out-of-range ids.
  std::string Decode(const std::vector<int>& ids) const;

  // Appends a (possibly multi-character) symbol; returns its id. Re-adding
  // an existing symbol returns the existing id.
  int AddSymbol(const std::string& symbol);

  std::optional<int> IdOf(const std::string& symbol) const;
  const std::string& SymbolOf(int id) const;  // regular symbols only
  const std::vector<std::string>& symbols() const { return symbols_; }

  std::string ToJson() const;
  static Tokenizer FromJson(const std::string& json_text);
  void Save(const std::string& path) const;
  static Tokenizer Load(const std::string& path);

  bool operator==(const Tokenizer& other) const {
    return symbols_ == other.symbols_;
  }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> to_id_;
};

}  // namespace sawt::text

#endif  // SAWT_TEXT_TOKENIZER_H_
