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

#include "sawt/text/tokenizer.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sawt/util/error.h"
#include "sawt/util/utf8.h"

namespace sawt::text {

using nlohmann::json;

Tokenizer Tokenizer::Build(const std::vector<std::string>& corpus,
                           const Tokenizer* base) {
  if (corpus.empty()) throw DataError("EmptyCorpus", "tokenizer corpus is empty");
  Tokenizer tok;
  if (base != nullptr) {
    for (const auto& sym : base->symbols_) tok.AddSymbol(sym);
  }
  std::set<char32_t> seen;
  for (const auto& line : corpus) {
    for (const char32_t cp : util::Utf8Decode(line)) seen.insert(cp);
  }
  // std::set iteration is codepoint order, so appended ids are reproducible.
  for (const char32_t cp : seen) {
    const std::string sym = util::Utf8Encode(cp);
    if (!tok.to_id_.contains(sym)) tok.AddSymbol(sym);
  }
  return tok;
}

std::vector<int> Tokenizer::Encode(const std::string& text,
                                   bool allow_unk) const {
  std::vector<int> ids;
  const auto cps = util::Utf8Decode(text);
  ids.reserve(cps.size());
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const std::string sym = util::Utf8Encode(cps[i]);
    const auto it = to_id_.find(sym);
    if (it != to_id_.end()) {
      ids.push_back(it->second);
    } else if (allow_unk) {
      ids.push_back(kUnk);
    } else {
      std::ostringstream os;
      os << "symbol '" << sym << "' at position " << i << " is out of vocabulary";
      throw DataError("UnknownSymbol", os.str());
    }
  }
  return ids;
}

std::string Tokenizer::Decode(const std::vector<int>& ids) const {
  std::string out;
  for (const int id : ids) {
    if (id < 0 || id >= vocab_size()) {
      throw DataError("InvalidId", "id " + std::to_string(id) +
                                       " outside vocabulary of size " +
                                       std::to_string(vocab_size()));
    }
    if (id < kNumSpecials) continue;
    out += symbols_[id - kNumSpecials];
  }
  return out;
}

int Tokenizer::AddSymbol(const std::string& symbol) {
  if (const auto it = to_id_.find(symbol); it != to_id_.end()) return it->second;
  symbols_.push_back(symbol);
  const int id = kNumSpecials + static_cast<int>(symbols_.size()) - 1;
  to_id_[symbol] = id;
  return id;
}

std::optional<int> Tokenizer::IdOf(const std::string& symbol) const {
  const auto it = to_id_.find(symbol);
  if (it == to_id_.end()) return std::nullopt;
  return it->second;
}

const std::string& Tokenizer::SymbolOf(int id) const {
  if (id < kNumSpecials || id >= vocab_size()) {
    throw DataError("InvalidId", "id " + std::to_string(id) +
                                     " is not a regular symbol id");
  }
  return symbols_[id - kNumSpecials];
}

std::string Tokenizer::ToJson() const {
  json j;
  j["specials"] = {{"pad", kPad},   {"bos", kBos},     {"eos", kEos},
                   {"unk", kUnk},   {"blank", kBlank}, {"mask", kMask}};
  j["symbols"] = symbols_;
  return j.dump(2);
}

Tokenizer Tokenizer::FromJson(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw DataError("ParseError", std::string("tokenizer json: ") + e.what());
  }
  Tokenizer tok;
  for (const auto& sym : j.at("symbols")) tok.AddSymbol(sym.get<std::string>());
  return tok;
}

void Tokenizer::Save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("FileNotFound", "cannot write tokenizer " + path);
  out << ToJson() << '\n';
}

Tokenizer Tokenizer::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("FileNotFound", "cannot open tokenizer " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return FromJson(ss.str());
}

}  // namespace sawt::text
