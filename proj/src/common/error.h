// Copyright 2026 The qgforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QGFORGE_COMMON_ERROR_H_
#define QGFORGE_COMMON_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace qgforge {

enum class ErrorCode {
  kInvalidArgument,
  kIo,
  kSyntax,
  kUnsupportedFeature,
  kRewrite,
  kValidation,
  kNonTree,
  kSerialization,
  kParse,
  kEval,
  kBudgetExceeded,
  kIllegalOp,
  kClassMismatch,
  kCopyViolation,
  kRange,
  kDeadState,
  kEmptyPool,
  kEmptyInput,
  kNoResult,
  kEmptyResult,
  kData,
  kCheckpoint,
};

std::string_view ErrorCodeName(ErrorCode code);

/*!
 * \brief The single exception type thrown by the library.
 *
 * Parse-style errors carry a 1-based line (and column, when known). Everything
 * else leaves them at zero.
 */
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, int line = 0, int column = 0)
      : std::runtime_error(message), code_(code), line_(line), column_(column) {}

  ErrorCode code() const { return code_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  ErrorCode code_;
  int line_;
  int column_;
};

}  // namespace qgforge

#define QG_CHECK(cond, code, msg)               \
  do {                                          \
    if (!(cond)) throw ::qgforge::Error(code, msg); \
  } while (0)

#endif  // QGFORGE_COMMON_ERROR_H_
