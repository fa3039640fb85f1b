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

#ifndef SAWT_UTIL_ERROR_H_
#define SAWT_UTIL_ERROR_H_

#include <stdexcept>
#include <string>

namespace sawt {

// Error categories map onto CLI exit codes: usage -> 2, data -> 3,
// numeric -> 4.
enum class ErrorKind { kUsage, kData, kNumeric };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message),
        kind_(kind),
        code_(std::move(code)) {}

  ErrorKind kind() const { return kind_; }
  const std::string& code() const { return code_; }

 private:
  ErrorKind kind_;
  std::string code_;
};

inline Error UsageError(const std::string& msg) {
  return Error(ErrorKind::kUsage, "Usage", msg);
}
inline Error DataError(const std::string& code, const std::string& msg) {
  return Error(ErrorKind::kData, code, msg);
}
inline Error NumericError(const std::string& code, const std::string& msg) {
  return Error(ErrorKind::kNumeric, code, msg);
}

}  // namespace sawt

#endif  // SAWT_UTIL_ERROR_H_
