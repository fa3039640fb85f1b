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

#include "sawt/text/buckwalter.h"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "sawt/util/error.h"
#include "sawt/util/utf8.h"

namespace sawt::text {

namespace {

// Canonical table. Letters first, then diacritics, then extended letters.
constexpr std::pair<char32_t, char> kTable[] = {
    {0x0621, '\''},  // hamza
    {0x0622, '|'},   // alef madda
    {0x0623, '>'},   // alef hamza above
    {0x0624, '&'},   // waw hamza
    {0x0625, '<'},   // alef hamza below
    {0x0626, '}'},   // yeh hamza
    {0x0627, 'A'},   // alef
    {0x0628, 'b'},   // beh
    {0x0629, 'p'},   // teh marbuta
    {0x062A, 't'},   // teh
    {0x062B, 'v'},   // theh
    {0x062C, 'j'},   // jeem
    {0x062D, 'H'},   // hah
    {0x062E, 'x'},   // khah
    {0x062F, 'd'},   // dal
    {0x0630, '*'},   // thal
    {0x0631, 'r'},   // reh
    {0x0632, 'z'},   // zain
    {0x0633, 's'},   // seen
    {0x0634, '$'},   // sheen
    {0x0635, 'S'},   // sad
    {0x0636, 'D'},   // dad
    {0x0637, 'T'},   // tah
    {0x0638, 'Z'},   // zah
    {0x0639, 'E'},   // ain
    {0x063A, 'g'},   // ghain
    {0x0640, '_'},   // tatweel
    {0x0641, 'f'},   // feh
    {0x0642, 'q'},   // qaf
    {0x0643, 'k'},   // kaf
    {0x0644, 'l'},   // lam
    {0x0645, 'm'},   // meem
    {0x0646, 'n'},   // noon
    {0x0647, 'h'},   // heh
    {0x0648, 'w'},   // waw
    {0x0649, 'Y'},   // alef maksura
    {0x064A, 'y'},   // yeh
    {0x064B, 'F'},   // fathatan
    {0x064C, 'N'},   // dammatan
    {0x064D, 'K'},   // kasratan
    {0x064E, 'a'},   // fatha
    {0x064F, 'u'},   // damma
    {0x0650, 'i'},   // kasra
    {0x0651, '~'},   // shadda
    {0x0652, 'o'},   // sukun
    {0x0670, '`'},   // superscript alef
    {0x0671, '{'},   // alef wasla
    {0x067E, 'P'},   // peh
    {0x0686, 'J'},   // tcheh
    {0x06A4, 'V'},   // veh
    {0x06AF, 'G'},   // gaf
};

const std::unordered_map<char32_t, char>& ForwardMap() {
  static const auto* map = [] {
    auto* m = new std::unordered_map<char32_t, char>();
    for (const auto& [cp, ch] : kTable) (*m)[cp] = ch;
    return m;
  }();
  return *map;
}

const std::unordered_map<char, char32_t>& InverseMap() {
  static const auto* map = [] {
    auto* m = new std::unordered_map<char, char32_t>();
    for (const auto& [cp, ch] : kTable) (*m)[ch] = cp;
    return m;
  }();
  return *map;
}

[[noreturn]] void ThrowUnmapped(char32_t cp, std::size_t position) {
  std::ostringstream os;
  os << "symbol '" << util::Utf8Encode(cp) << "' (U+" << std::hex << std::uppercase
     << static_cast<std::uint32_t>(cp) << std::dec << ") at position " << position;
  throw DataError("UnmappedSymbol", os.str());
}

}  // namespace

const std::vector<std::pair<char32_t, char>>& BuckwalterTable() {
  static const auto* table = new std::vector<std::pair<char32_t, char>>(
      std::begin(kTable), std::end(kTable));
  return *table;
}

std::string ToBuckwalter(const std::string& text) {
  const auto cps = util::Utf8Decode(text);
  std::string out;
  out.reserve(cps.size());
  const auto& fwd = ForwardMap();
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t cp = cps[i];
    if (const auto it = fwd.find(cp); it != fwd.end()) {
      out += it->second;
    } else if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else {
      ThrowUnmapped(cp, i);
    }
  }
  return out;
}

std::string FromBuckwalter(const std::string& text) {
  std::vector<char32_t> out;
  out.reserve(text.size());
  const auto& inv = InverseMap();
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (const auto it = inv.find(c); it != inv.end()) {
      out.push_back(it->second);
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '@' ||
               c == '%' || std::isspace(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char32_t>(c));
    } else {
      ThrowUnmapped(static_cast<char32_t>(static_cast<unsigned char>(c)), i);
    }
  }
  return util::Utf8Encode(out);
}

std::vector<std::pair<char32_t, char>> LoadBuckwalterTable(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("FileNotFound", "cannot open table file " + path);
  std::vector<std::pair<char32_t, char>> table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab + 1 >= line.size()) {
      throw DataError("ParseError",
                      "malformed table line " + std::to_string(lineno));
    }
    const char32_t cp =
        static_cast<char32_t>(std::stoul(line.substr(0, tab), nullptr, 16));
    table.emplace_back(cp, line[tab + 1]);
  }
  return table;
}

void WriteBuckwalterTable(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("FileNotFound", "cannot write table file " + path);
  out << "# Arabic <-> ASCII transliteration table\n"
      << "# hex codepoint <TAB> ascii char, one mapping per line\n";
  char buf[8];
  for (const auto& [cp, ch] : kTable) {
    std::snprintf(buf, sizeof(buf), "%04X", static_cast<unsigned>(cp));
    out << buf << '\t' << ch << '\n';
  }
}

}  // namespace sawt::text
