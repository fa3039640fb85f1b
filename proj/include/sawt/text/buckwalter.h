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

#ifndef SAWT_TEXT_BUCKWALTER_H_
#define SAWT_TEXT_BUCKWALTER_H_

#include <string>
#include <utility>
#include <vector>

namespace sawt::text {

// The reversible 1:1 Arabic-script <-> ASCII transliteration table.
// Each Arabic codepoint maps to exactly one ASCII character and back.
const std::vector<std::pair<char32_t, char>>& BuckwalterTable();

// Arabic script -> ASCII. Codepoints in the table are transliterated;
// ASCII passes through. Anything else raises UnmappedSymbol with the
// offending character and its codepoint position.
std::string ToBuckwalter(const std::string& text);

// ASCII -> Arabic script, the exact inverse of ToBuckwalter on its image.
// Digits, '@', '%', and whitespace pass through; other characters outside
// the table image raise UnmappedSymbol.
std::string FromBuckwalter(const std::string& text);

// Resource-file form: one "XXXX<TAB>c" line per mapping (hex codepoint,
// ASCII char), '#' comments.
std::vector<std::pair<char32_t, char>> LoadBuckwalterTable(
    const std::string& path);
void WriteBuckwalterTable(const std::string& path);

}  // namespace sawt::text

#endif  // SAWT_TEXT_BUCKWALTER_H_
