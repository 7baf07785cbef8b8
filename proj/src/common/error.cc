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

#include "callprobe/common/error.h"

namespace callprobe {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
    case ErrorCode::kSignalTooShort:
      return "SignalTooShort";
    case ErrorCode::kConfigError:
      return "ConfigError";
    case ErrorCode::kEmptySequence:
      return "EmptySequence";
    case ErrorCode::kUnsupportedAudio:
      return "UnsupportedAudio";
    case ErrorCode::kIoError:
      return "IoError";
    case ErrorCode::kParseError:
      return "ParseError";
    case ErrorCode::kNoOverlappingCall:
      return "NoOverlappingCall";
    case ErrorCode::kTooFewRecordings:
      return "TooFewRecordings";
    case ErrorCode::kFormatError:
      return "FormatError";
    case ErrorCode::kDimMismatch:
      return "DimMismatch";
    case ErrorCode::kNonFiniteValue:
      return "NonFiniteValue";
    case ErrorCode::kShapeMismatch:
      return "ShapeMismatch";
    case ErrorCode::kNonTemporalInput:
      return "NonTemporalInput";
    case ErrorCode::kNonFiniteGradient:
      return "NonFiniteGradient";
    case ErrorCode::kDegenerateClass:
      return "DegenerateClass";
    case ErrorCode::kAllClassesDegenerate:
      return "AllClassesDegenerate";
    case ErrorCode::kMissingLayerStore:
      return "MissingLayerStore";
    case ErrorCode::kInvalidSpec:
      return "InvalidSpec";
  }
  return "Unknown";
}

}  // namespace callprobe
