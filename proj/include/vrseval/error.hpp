// Copyright 2026 The vrseval Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <stdexcept>
#include <string>

namespace vrs {

/// Failure categories. The CLI maps these onto exit codes: input errors
/// (parse, schema, reference, vocabulary, io) exit 1, constraint errors exit 2.
enum class ErrorKind {
  kDimension,
  kCorruptMask,
  kEmptyMask,
  kInvalidArgument,
  kParse,
  kSchema,
  kReference,
  kVocabulary,
  kIo,
  kConstraint,
};

inline const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDimension: return "dimension";
    case ErrorKind::kCorruptMask: return "corrupt-mask";
    case ErrorKind::kEmptyMask: return "empty-mask";
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kSchema: return "schema";
    case ErrorKind::kReference: return "reference";
    case ErrorKind::kVocabulary: return "vocabulary";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kConstraint: return "constraint";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_kind_name(kind)) + " error: " + message),
        kind_(kind),
        message_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& message() const noexcept { return message_; }

  /// Same error with a location prefix, e.g. "file.jsonl:12".
  Error with_context(const std::string& where) const { return Error(kind_, where + ": " + message_); }

  bool is_input_error() const noexcept {
    return kind_ == ErrorKind::kParse || kind_ == ErrorKind::kSchema ||
           kind_ == ErrorKind::kReference || kind_ == ErrorKind::kVocabulary ||
           kind_ == ErrorKind::kIo || kind_ == ErrorKind::kCorruptMask ||
           kind_ == ErrorKind::kDimension;
  }

 private:
  ErrorKind kind_;
  std::string message_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace vrs
