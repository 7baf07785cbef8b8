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

#include "callprobe/dsp/wav.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>

#include "callprobe/common/byte_io.h"
#include "callprobe/common/error.h"

namespace callprobe::dsp {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t U16(const char* p) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(p[0]) |
                                    (static_cast<unsigned char>(p[1]) << 8));
}

std::string FourCc(const std::array<char, 4>& id) {
  return std::string(id.data(), id.size());
}

double DecodeSample(const char* p, int bytes_per_sample) {
  if (bytes_per_sample == 2) {
    const auto v = static_cast<std::int16_t>(U16(p));
    return static_cast<double>(v) / 32768.0;
  }
  // 24-bit: sign-extend from the top byte.
  std::int32_t v = static_cast<unsigned char>(p[0]) |
                   (static_cast<unsigned char>(p[1]) << 8) |
                   (static_cast<unsigned char>(p[2]) << 16);
  if (v & 0x800000) v -= 0x1000000;
  return static_cast<double>(v) / 8388608.0;
}

}  // namespace

std::vector<double> MixDown(const std::vector<double>& interleaved,
                            int channels) {
  if (channels < 1 || interleaved.size() % channels != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "sample count " + std::to_string(interleaved.size()) +
                    " is not a multiple of channel count " +
                    std::to_string(channels));
  }
  if (channels == 1) return interleaved;
  std::vector<double> mono(interleaved.size() / channels);
  for (std::size_t i = 0; i < mono.size(); ++i) {
    double sum = 0.0;
    for (int c = 0; c < channels; ++c) sum += interleaved[i * channels + c];
    mono[i] = sum / channels;
  }
  return mono;
}

Waveform ReadWav(std::istream& in) {
  LittleEndianReader reader(in, "wav");
  std::array<char, 4> id;
  reader.ReadBytes(id, "RIFF id");
  if (FourCc(id) != "RIFF") {
    throw Error(ErrorCode::kUnsupportedAudio, "missing RIFF header");
  }
  reader.ReadU32("RIFF size");
  reader.ReadBytes(id, "WAVE id");
  if (FourCc(id) != "WAVE") {
    throw Error(ErrorCode::kUnsupportedAudio, "missing WAVE tag");
  }

  int channels = 0;
  int sample_rate = 0;
  int bits = 0;
  bool have_format = false;
  std::vector<char> data;
  bool have_data = false;
  while (!have_data) {
    reader.ReadBytes(id, "chunk id");
    const std::uint32_t size = reader.ReadU32("chunk size");
    std::vector<char> body(size);
    reader.ReadBytes(body, "chunk body");
    if (size % 2 == 1 && !reader.AtEnd()) {
      std::array<char, 1> pad;
      reader.ReadBytes(pad, "chunk padding");
    }
    const std::string name = FourCc(id);
    if (name == "fmt ") {
      if (size < 16) {
        throw Error(ErrorCode::kUnsupportedAudio, "fmt chunk too small");
      }
      const std::uint16_t format = U16(body.data());
      if (format != kFormatPcm && format != kFormatExtensible) {
        throw Error(ErrorCode::kUnsupportedAudio,
                    "only integer PCM is supported (format tag " +
                        std::to_string(format) + ")");
      }
      channels = U16(body.data() + 2);
      sample_rate = static_cast<int>(
          static_cast<unsigned char>(body[4]) |
          (static_cast<unsigned char>(body[5]) << 8) |
          (static_cast<unsigned char>(body[6]) << 16) |
          (static_cast<std::uint32_t>(static_cast<unsigned char>(body[7]))
           << 24));
      bits = U16(body.data() + 14);
      have_format = true;
    } else if (name == "data") {
      data = std::move(body);
      have_data = true;
    }
  }
  if (!have_format) {
    throw Error(ErrorCode::kUnsupportedAudio, "data chunk before fmt chunk");
  }
  if (bits != 16 && bits != 24) {
    throw Error(ErrorCode::kUnsupportedAudio,
                "unsupported bit depth " + std::to_string(bits));
  }
  if (channels < 1 || channels > 2) {
    throw Error(ErrorCode::kUnsupportedAudio,
                "unsupported channel count " + std::to_string(channels));
  }
  if (sample_rate <= 0) {
    throw Error(ErrorCode::kUnsupportedAudio, "non-positive sample rate");
  }

  const int bytes_per_sample = bits / 8;
  const std::size_t count = data.size() / bytes_per_sample;
  std::vector<double> interleaved(count - count % channels);
  for (std::size_t i = 0; i < interleaved.size(); ++i) {
    interleaved[i] = DecodeSample(data.data() + i * bytes_per_sample,
                                  bytes_per_sample);
  }

  Waveform w;
  w.samples = MixDown(interleaved, channels);
  w.sample_rate = sample_rate;
  w.source_channels = channels;
  return w;
}

Waveform ReadWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  }
  return ReadWav(in);
}

void WriteWavPcm16(std::ostream& out, const std::vector<double>& interleaved,
                   int sample_rate, int channels) {
  LittleEndianWriter w(out);
  const auto data_bytes = static_cast<std::uint32_t>(interleaved.size() * 2);
  w.WriteBytes(std::span<const char>("RIFF", 4));
  w.WriteU32(36 + data_bytes);
  w.WriteBytes(std::span<const char>("WAVEfmt ", 8));
  w.WriteU32(16);
  const std::uint32_t block_align = channels * 2;
  // format tag (1) and channel count packed as two u16.
  w.WriteU32(kFormatPcm | (static_cast<std::uint32_t>(channels) << 16));
  w.WriteU32(sample_rate);
  w.WriteU32(sample_rate * block_align);
  w.WriteU32(block_align | (16u << 16));
  w.WriteBytes(std::span<const char>("data", 4));
  w.WriteU32(data_bytes);
  for (double s : interleaved) {
    const double clipped = std::clamp(s, -1.0, 32767.0 / 32768.0);
    const auto v = static_cast<std::int16_t>(std::lround(clipped * 32768.0));
    const auto u = static_cast<std::uint16_t>(v);
    const char bytes[2] = {static_cast<char>(u & 0xFF),
                           static_cast<char>(u >> 8)};
    w.WriteBytes(bytes);
  }
}

void WriteWavPcm16(const std::filesystem::path& path,
                   const std::vector<double>& interleaved, int sample_rate,
                   int channels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot create " + path.string());
  }
  WriteWavPcm16(out, interleaved, sample_rate, channels);
}

}  // namespace callprobe::dsp
