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

#include "common/error.h"

namespace qgforge {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kSyntax: return "SyntaxError";
    case ErrorCode::kUnsupportedFeature: return "UnsupportedFeature";
    case ErrorCode::kRewrite: return "RewriteError";
    case ErrorCode::kValidation: return "ValidationError";
    case ErrorCode::kNonTree: return "NonTreeError";
    case ErrorCode::kSerialization: return "SerializationError";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kEval: return "EvalError";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kIllegalOp: return "IllegalOp";
    case ErrorCode::kClassMismatch: return "ClassMismatch";
    case ErrorCode::kCopyViolation: return "CopyViolation";
    case ErrorCode::kRange: return "RangeError";
    case ErrorCode::kDeadState: return "DeadState";
    case ErrorCode::kEmptyPool: return "EmptyPool";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kNoResult: return "NoResult";
    case ErrorCode::kEmptyResult: return "EmptyResult";
    case ErrorCode::kData: return "DataError";
    case ErrorCode::kCheckpoint: return "CheckpointError";
  }
  return "Unknown";
}

}  // namespace qgforge
