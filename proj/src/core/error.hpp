// Copyright 2026 The srnn Authors. All Rights Reserved.
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

#pragma once

#include <stdexcept>
#include <string>

namespace srnn {

// Error categories surface through the C API as distinct status codes.
enum class ErrorCode {
  kInvalidArgument,  // bad value, bad config, precondition violated
  kNotFound,         // missing input file or prerequisite artifact
  kIo,               // read/write failure on an existing path
  kFormat,           // malformed file contents
  kUnsupported,      // well-formed but outside what we accept (e.g. 24-bit WAV)
  kNumeric,          // non-finite loss or similar
  kInternal,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  Error(ErrorCode code, std::string stage, const std::string& message)
      : std::runtime_error(message), code_(code), stage_(std::move(stage)) {}

  ErrorCode code() const { return code_; }
  // Pipeline stage that raised the error, empty when not raised by a command.
  const std::string& stage() const { return stage_; }

 private:
  ErrorCode code_;
  std::string stage_;
};

// True for errors caused by the caller's inputs rather than by execution.
inline bool is_validation_error(ErrorCode code) {
  return code == ErrorCode::kInvalidArgument || code == ErrorCode::kNotFound;
}

}  // namespace srnn
