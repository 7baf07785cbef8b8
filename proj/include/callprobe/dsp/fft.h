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

#ifndef CALLPROBE_DSP_FFT_H_
#define CALLPROBE_DSP_FFT_H_

#include <complex>
#include <span>
#include <vector>

namespace callprobe::dsp {

// Power spectrum of real frames at a fixed transform size. Power-of-two sizes
// use an iterative radix-2 transform; other sizes fall back to a direct DFT.
// Immutable after construction, so one instance can serve many threads.
class PowerSpectrumTransform {
 public:
  explicit PowerSpectrumTransform(int n_fft);

  int size() const { return n_fft_; }
  int num_bins() const { return n_fft_ / 2 + 1; }

  // `frame` is zero-padded to size(); frames longer than size() are rejected
  // with kConfigError. Writes |X_k|^2 for k = 0 .. size()/2.
  void Compute(std::span<const double> frame, std::span<double> power) const;

 private:
  int n_fft_;
  bool radix2_;
  std::vector<std::complex<double>> twiddles_;
  std::vector<int> bit_reverse_;
};

}  // namespace callprobe::dsp

#endif  // CALLPROBE_DSP_FFT_H_
