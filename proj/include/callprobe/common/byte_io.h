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

#ifndef CALLPROBE_COMMON_BYTE_IO_H_
#define CALLPROBE_COMMON_BYTE_IO_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <utility>

namespace callprobe {

// Little-endian primitive encoding, independent of host byte order.
class LittleEndianWriter {
 public:
  explicit LittleEndianWriter(std::ostream& out) : out_(out) {}

  void WriteBytes(std::span<const char> bytes);
  void WriteU32(std::uint32_t v);
  void WriteU64(std::uint64_t v);
  void WriteF32(float v);
  void WriteF64(double v);

  std::uint64_t offset() const { return offset_; }

 private:
  std::ostream& out_;
  std::uint64_t offset_ = 0;
};

// Reads little-endian primitives and tracks the byte offset so that a short
// read can be reported precisely. Short reads throw kFormatError.
class LittleEndianReader {
 public:
  LittleEndianReader(std::istream& in, std::string source)
      : in_(in), source_(std::move(source)) {}

  void ReadBytes(std::span<char> bytes, const char* what);
  std::uint32_t ReadU32(const char* what);
  std::uint64_t ReadU64(const char* what);
  float ReadF32(const char* what);
  double ReadF64(const char* what);

  // True when no further byte is available.
  bool AtEnd();
  std::uint64_t offset() const { return offset_; }
  const std::string& source() const { return source_; }

 private:
  std::istream& in_;
  std::string source_;
  std::uint64_t offset_ = 0;
};

}  // namespace callprobe

#endif  // CALLPROBE_COMMON_BYTE_IO_H_
