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

#ifndef SAWT_TEXT_NORMALIZE_H_
#define SAWT_TEXT_NORMALIZE_H_

#include <string>

namespace sawt::text {

// Cleans raw transcript text for training and scoring:
//   - drops Arabic diacritics (U+064B..U+0652, superscript alef U+0670)
//     and tatweel (U+0640),
//   - maps Indo-Arabic digits (U+0660..U+0669, U+06F0..U+06F9) to ASCII,
//   - maps the Arabic percent sign (U+066A) to '%',
//   - removes punctuation (general category P*) except '@' and '%',
//   - collapses whitespace runs to single spaces and trims the ends.
// Total and idempotent.
std::string NormalizeText(const std::string& raw);

// Character classes used by NormalizeText, exposed for tests and scoring.
bool IsArabicDiacritic(char32_t cp);
bool IsRemovablePunct(char32_t cp);  // punctuation minus {@, %}
bool IsSpaceChar(char32_t cp);

}  // namespace sawt::text

#endif  // SAWT_TEXT_NORMALIZE_H_
