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

#ifndef SAWT_UTIL_UTF8_H_
#define SAWT_UTIL_UTF8_H_

#include <string>
#include <string_view>
#include <vector>

namespace sawt::util {

// Decodes UTF-8 into codepoints. Malformed bytes become U+FFFD.
std::vector<char32_t> Utf8Decode(std::string_view s);

std::string Utf8Encode(const std::vector<char32_t>& cps);
std::string Utf8Encode(char32_t cp);

}  // namespace sawt::util

#endif  // SAWT_UTIL_UTF8_H_
