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

#include "sawt/text/normalize.h"

#include <vector>

#include "sawt/util/utf8.h"

namespace sawt::text {

namespace {

struct Range {
  char32_t lo, hi;
};

// Unicode general category P* (punctuation), restricted to the blocks that
// occur in broadcast transcripts and web text. Symbols (S*: $ + < = > ^ ` |
// ~ and currency signs) are deliberately not listed; only punctuation is
// removed.
constexpr Range kPunctRanges[] = {
    {0x0021, 0x0023},  // ! " #
    {0x0025, 0x002A},  // % & ' ( ) *   (% handled separately as a keeper)
    {0x002C, 0x002F},  // , - . /
    {0x003A, 0x003B},  // : ;
    {0x003F, 0x0040},  // ? @           (@ handled separately as a keeper)
    {0x005B, 0x005D},  // [ \ ]
    {0x005F, 0x005F},  // _
    {0x007B, 0x007B},  // {
    {0x007D, 0x007D},  // }
    {0x00A1, 0x00A1},  // inverted exclamation
    {0x00A7, 0x00A7},  // section sign
    {0x00AB, 0x00AB},  // left guillemet
    {0x00B6, 0x00B7},  // pilcrow, middle dot
    {0x00BB, 0x00BB},  // right guillemet
    {0x00BF, 0x00BF},  // inverted question mark
    {0x055A, 0x055F},  // Armenian punctuation
    {0x0589, 0x058A},
    {0x0609, 0x060A},  // Arabic-Indic per-mille / per-ten-thousand
    {0x060C, 0x060D},  // Arabic comma, date separator
    {0x061B, 0x061B},  // Arabic semicolon
    {0x061E, 0x061F},  // Arabic triple dot, question mark
    {0x066A, 0x066D},  // Arabic percent, decimal/thousands separators, star
    {0x06D4, 0x06D4},  // Arabic full stop
    {0x0700, 0x070D},  // Syriac punctuation
    {0x2010, 0x2027},  // hyphens, dashes, quotes, daggers, bullets, ellipsis
    {0x2030, 0x2043},  // per-mille..hyphen bullet
    {0x2045, 0x2051},
    {0x2053, 0x205E},
    {0x3001, 0x3003},  // CJK comma, full stop, ditto
    {0x3008, 0x3011},  // CJK brackets
    {0x3014, 0x301F},
    {0xFD3E, 0xFD3F},  // ornate parentheses
    {0xFE50, 0xFE52},  // small comma forms
    {0xFE54, 0xFE57},
    {0xFF01, 0xFF03},  // fullwidth ! " #
    {0xFF05, 0xFF0A},
    {0xFF0C, 0xFF0F},
    {0xFF1A, 0xFF1B},
    {0xFF1F, 0xFF20},
    {0xFF3B, 0xFF3D},
    {0xFF5B, 0xFF5B},
    {0xFF5D, 0xFF5D},
    {0xFF5F, 0xFF65},
};

bool InRanges(char32_t cp, const Range* ranges, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (cp >= ranges[i].lo && cp <= ranges[i].hi) return true;
  }
  return false;
}

}  // namespace

bool IsArabicDiacritic(char32_t cp) {
  return (cp >= 0x064B && cp <= 0x0652) || cp == 0x0670 || cp == 0x0640;
}

bool IsRemovablePunct(char32_t cp) {
  if (cp == U'@' || cp == U'%') return false;
  return InRanges(cp, kPunctRanges, std::size(kPunctRanges));
}

bool IsSpaceChar(char32_t cp) {
  switch (cp) {
    case U' ':
    case U'\t':
    case U'\n':
    case U'\r':
    case U'\f':
    case U'\v':
    case 0x00A0:
    case 0x202F:
    case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

std::string NormalizeText(const std::string& raw) {
  const std::vector<char32_t> cps = util::Utf8Decode(raw);
  std::vector<char32_t> out;
  out.reserve(cps.size());
  bool pending_space = false;
  for (char32_t cp : cps) {
    if (cp >= 0x0660 && cp <= 0x0669) cp = U'0' + (cp - 0x0660);
    if (cp >= 0x06F0 && cp <= 0x06F9) cp = U'0' + (cp - 0x06F0);
    if (cp == 0x066A) cp = U'%';
    if (IsArabicDiacritic(cp)) continue;
    if (IsRemovablePunct(cp)) continue;
    if (IsSpaceChar(cp)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(U' ');
    pending_space = false;
    out.push_back(cp);
  }
  return util::Utf8Encode(out);
}

}  // namespace sawt::text
