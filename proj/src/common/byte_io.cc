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

#include "callprobe/common/byte_io.h"

#include <array>
#include <bit>
#include <cstring>

#include "callprobe/common/error.h"

namespace callprobe {
namespace {

template <typename UInt>
void EncodeLittle(UInt v, char* dst) {
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    dst[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  }
}

template <typename UInt>
UInt DecodeLittle(const char* src) {
  UInt v = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    v |= static_cast<UInt>(static_cast<unsigned char>(src[i])) << (8 * i);
  }
  return v;
}

}  // namespace

void LittleEndianWriter::WriteBytes(std::span<const char> bytes) {
  out_.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out_) {
    throw Error(ErrorCode::kIoError,
                "write failed at byte offset " + std::to_string(offset_));
  }
  offset_ += bytes.size();
}

void LittleEndianWriter::WriteU32(std::uint32_t v) {
  std::array<char, 4> buf;
  EncodeLittle(v, buf.data());
  WriteBytes(buf);
}

void LittleEndianWriter::WriteU64(std::uint64_t v) {
  std::array<char, 8> buf;
  EncodeLittle(v, buf.data());
  WriteBytes(buf);
}

void LittleEndianWriter::WriteF32(float v) {
  WriteU32(std::bit_cast<std::uint32_t>(v));
}

void LittleEndianWriter::WriteF64(double v) {
  WriteU64(std::bit_cast<std::uint64_t>(v));
}

void LittleEndianReader::ReadBytes(std::span<char> bytes, const char* what) {
  in_.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  const auto got = static_cast<std::uint64_t>(in_.gcount());
  if (got != bytes.size()) {
    throw Error(ErrorCode::kFormatError,
                source_ + ": truncated while reading " + what +
                    " at byte offset " + std::to_string(offset_ + got) +
                    " (needed " + std::to_string(bytes.size()) +
                    " bytes from offset " + std::to_string(offset_) + ")");
  }
  offset_ += got;
}

std::uint32_t LittleEndianReader::ReadU32(const char* what) {
  std::array<char, 4> buf;
  ReadBytes(buf, what);
  return DecodeLittle<std::uint32_t>(buf.data());
}

std::uint64_t LittleEndianReader::ReadU64(const char* what) {
  std::array<char, 8> buf;
  ReadBytes(buf, what);
  return DecodeLittle<std::uint64_t>(buf.data());
}

float LittleEndianReader::ReadF32(const char* what) {
  return std::bit_cast<float>(ReadU32(what));
}

double LittleEndianReader::ReadF64(const char* what) {
  return std::bit_cast<double>(ReadU64(what));
}

bool LittleEndianReader::AtEnd() {
  return in_.peek() == std::istream::traits_type::eof();
}

}  // namespace callprobe
