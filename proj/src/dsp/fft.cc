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

#include "callprobe/dsp/fft.h"

#include <cmath>
#include <numbers>
#include <string>

#include "callprobe/common/error.h"

namespace callprobe::dsp {
namespace {

bool IsPowerOfTwo(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

PowerSpectrumTransform::PowerSpectrumTransform(int n_fft)
    : n_fft_(n_fft), radix2_(IsPowerOfTwo(n_fft)) {
  if (n_fft < 2) {
    throw Error(ErrorCode::kConfigError,
                "transform size must be >= 2, got " + std::to_string(n_fft));
  }
  // twiddles_[k] = exp(-2*pi*i*k/n); the direct DFT indexes it modulo n.
  twiddles_.resize(n_fft);
  for (int k = 0; k < n_fft; ++k) {
    const double angle = -2.0 * std::numbers::pi * k / n_fft;
    twiddles_[k] = {std::cos(angle), std::sin(angle)};
  }
  if (radix2_) {
    int bits = 0;
    while ((1 << bits) < n_fft) ++bits;
    bit_reverse_.resize(n_fft);
    for (int i = 0; i < n_fft; ++i) {
      int r = 0;
      for (int b = 0; b < bits; ++b) r |= ((i >> b) & 1) << (bits - 1 - b);
      bit_reverse_[i] = r;
    }
  }
}

void PowerSpectrumTransform::Compute(std::span<const double> frame,
                                     std::span<double> power) const {
  if (static_cast<int>(frame.size()) > n_fft_) {
    throw Error(ErrorCode::kConfigError,
                "frame of " + std::to_string(frame.size()) +
                    " samples exceeds transform size " +
                    std::to_string(n_fft_));
  }
  const int bins = num_bins();
  if (static_cast<int>(power.size()) != bins) {
    throw Error(ErrorCode::kShapeMismatch, "power buffer has wrong size");
  }

  if (!radix2_) {
    for (int k = 0; k < bins; ++k) {
      std::complex<double> acc = 0.0;
      for (std::size_t n = 0; n < frame.size(); ++n) {
        acc += frame[n] * twiddles_[(static_cast<long long>(k) * n) % n_fft_];
      }
      power[k] = std::norm(acc);
    }
    return;
  }

  std::vector<std::complex<double>> buf(n_fft_, 0.0);
  for (std::size_t n = 0; n < frame.size(); ++n) {
    buf[bit_reverse_[n]] = frame[n];
  }
  for (int len = 2; len <= n_fft_; len <<= 1) {
    const int half = len / 2;
    const int step = n_fft_ / len;
    for (int start = 0; start < n_fft_; start += len) {
      for (int j = 0; j < half; ++j) {
        const std::complex<double> t = twiddles_[j * step] * buf[start + j + half];
        buf[start + j + half] = buf[start + j] - t;
        buf[start + j] += t;
      }
    }
  }
  for (int k = 0; k < bins; ++k) power[k] = std::norm(buf[k]);
}

}  // namespace callprobe::dsp
