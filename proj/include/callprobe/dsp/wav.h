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

#ifndef CALLPROBE_DSP_WAV_H_
#define CALLPROBE_DSP_WAV_H_

#include <filesystem>
#include <istream>
#include <ostream>
#include <vector>

namespace callprobe::dsp {

// Mono signal in [-1, 1]. `source_channels` records the channel count of the
// file before mixdown.
struct Waveform {
  std::vector<double> samples;
  double sample_rate = 0.0;
  int source_channels = 1;

  double duration_seconds() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate
                           : 0.0;
  }
};

// Averages interleaved channels into one. Throws kInvalidArgument when the
// sample count is not a multiple of `channels`.
std::vector<double> MixDown(const std::vector<double>& interleaved,
                            int channels);

// Reads a RIFF/WAVE PCM file (16- or 24-bit integer, little-endian, one or two
// channels) and mixes it down to mono.
Waveform ReadWav(std::istream& in);
Waveform ReadWav(const std::filesystem::path& path);

// Writes interleaved 16-bit PCM. Used for fixtures and round trips.
void WriteWavPcm16(std::ostream& out, const std::vector<double>& interleaved,
                   int sample_rate, int channels);
void WriteWavPcm16(const std::filesystem::path& path,
                   const std::vector<double>& interleaved, int sample_rate,
                   int channels);

}  // namespace callprobe::dsp

#endif  // CALLPROBE_DSP_WAV_H_
