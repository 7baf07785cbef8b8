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

#ifndef CALLPROBE_DSP_FEATURES_H_
#define CALLPROBE_DSP_FEATURES_H_

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "callprobe/dsp/wav.h"

namespace callprobe::dsp {

// Analysis parameters in physical units. Resolve against a sample rate with
// ResolveLayout() before use.
struct SpectralConfig {
  double frame_length_s = 0.025;
  double stride_s = 0.010;
  // 0 selects the next power of two >= the frame length in samples.
  int n_fft = 1024;
  int n_mels = 128;
  int n_ceps = 40;
  double fmin_hz = 0.0;
  // 0 selects the Nyquist frequency.
  double fmax_hz = 0.0;
  double log_floor = 1e-10;

  // 25 ms / 10 ms frames, 1024-point transform, 128 mel filters, 40 cepstra.
  static SpectralConfig Mfcc();
  // 50 ms / 10 ms frames, transform sized to the frame, `n_ceps` cepstra.
  static SpectralConfig Beans(int n_ceps);
};

// SpectralConfig resolved for one sample rate: everything in samples/bins.
struct FrameLayout {
  double sample_rate = 0.0;
  int frame_samples = 0;
  int stride_samples = 0;
  int n_fft = 0;
  int n_mels = 0;
  int n_ceps = 0;
  double fmin_hz = 0.0;
  double fmax_hz = 0.0;
  double log_floor = 0.0;

  int num_bins() const { return n_fft / 2 + 1; }
};

// Throws kConfigError when the configuration is inconsistent for the rate.
FrameLayout ResolveLayout(const SpectralConfig& cfg, double sample_rate);

// 1 + floor((n - frame) / stride); requires n >= frame.
std::size_t FrameCount(std::size_t n, int frame, int stride);

// w[n] = 0.5 - 0.5 cos(2 pi n / length).
std::vector<double> PeriodicHann(int length);

// HTK mel scale.
double HzToMel(double hz);
double MelToHz(double mel);

// Triangular filters with unit peak, equally spaced on the mel scale between
// fmin and fmax, evaluated at the transform bin frequencies.
// Shape: n_mels x num_bins.
Eigen::MatrixXd MelFilterbank(const FrameLayout& layout);

// Windowed frames, one per row (T x frame_samples). No padding past the last
// full frame. Throws kSignalTooShort if fewer than frame_samples samples.
Eigen::MatrixXd FrameSignal(std::span<const double> samples,
                            const FrameLayout& layout);

// Per-frame log(max(mel energy, floor)); T x n_mels.
Eigen::MatrixXd LogMelSpectrogram(const Eigen::MatrixXd& framed,
                                  const FrameLayout& layout);

// Orthonormal type-II DCT along each row, keeping the first n_ceps outputs.
Eigen::MatrixXd DctOrthonormal(const Eigen::MatrixXd& rows, int n_ceps);

struct FeatureSequence {
  Eigen::MatrixXd frames;          // T x C
  std::vector<double> frame_times;  // frame centres in seconds
};

FeatureSequence MfccSequence(const Waveform& w, const SpectralConfig& cfg);

// [mean; std; min; max] per column over frames (population std).
Eigen::VectorXd BeansEmbedding(const FeatureSequence& seq);

}  // namespace callprobe::dsp

#endif  // CALLPROBE_DSP_FEATURES_H_
