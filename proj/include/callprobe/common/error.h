/*
 * Copyright 2026 The callprobe Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CALLPROBE_COMMON_ERROR_H_
#define CALLPROBE_COMMON_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace callprobe {

// Every failure raised by the library carries one of these codes so callers
// (and tests) can branch on the kind without parsing messages.
enum class ErrorCode {
  kInvalidArgument,
  kSignalTooShort,
  kConfigError,
  kEmptySequence,
  kUnsupportedAudio,
  kIoError,
  kParseError,
  kNoOverlappingCall,
  kTooFewRecordings,
  kFormatError,
  kDimMismatch,
  kNonFiniteValue,
  kShapeMismatch,
  kNonTemporalInput,
  kNonFiniteGradient,
  kDegenerateClass,
  kAllClassesDegenerate,
  kMissingLayerStore,
  kInvalidSpec,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace callprobe

#endif  // CALLPROBE_COMMON_ERROR_H_
