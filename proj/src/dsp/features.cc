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

#include "callprobe/dsp/features.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "callprobe/common/error.h"
#include "callprobe/dsp/fft.h"

namespace callprobe::dsp {
namespace {

int NextPowerOfTwo(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

void Require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::kConfigError, message);
}

}  // namespace

SpectralConfig SpectralConfig::Mfcc() { return SpectralConfig{}; }

SpectralConfig SpectralConfig::Beans(int n_ceps) {
  SpectralConfig cfg;
  cfg.frame_length_s = 0.050;
  cfg.stride_s = 0.010;
  cfg.n_fft = 0;
  cfg.n_ceps = n_ceps;
  return cfg;
}

FrameLayout ResolveLayout(const SpectralConfig& cfg, double sample_rate) {
  Require(sample_rate > 0, "sample rate must be positive");
  Require(cfg.stride_s > 0, "stride must be positive");
  Require(cfg.frame_length_s >= cfg.stride_s,
          "frame length must be at least the stride");
  Require(cfg.log_floor > 0, "log floor must be positive");

  FrameLayout layout;
  layout.sample_rate = sample_rate;
  layout.frame_samples =
      static_cast<int>(std::lround(cfg.frame_length_s * sample_rate));
  layout.stride_samples =
      static_cast<int>(std::lround(cfg.stride_s * sample_rate));
  Require(layout.stride_samples >= 1, "stride rounds to zero samples");
  layout.n_fft =
      cfg.n_fft > 0 ? cfg.n_fft : NextPowerOfTwo(layout.frame_samples);
  Require(layout.frame_samples <= layout.n_fft,
          "frame of " + std::to_string(layout.frame_samples) +
              " samples exceeds n_fft " + std::to_string(layout.n_fft));
  layout.n_mels = cfg.n_mels;
  layout.n_ceps = cfg.n_ceps;
  Require(cfg.n_ceps >= 1 && cfg.n_ceps <= cfg.n_mels,
          "need 1 <= n_ceps <= n_mels");
  Require(cfg.n_mels <= layout.num_bins(), "n_mels exceeds n_fft/2+1");
  layout.fmin_hz = cfg.fmin_hz;
  layout.fmax_hz = cfg.fmax_hz > 0 ? cfg.fmax_hz : sample_rate / 2.0;
  Require(layout.fmin_hz >= 0 && layout.fmin_hz < layout.fmax_hz,
          "need 0 <= fmin < fmax");
  Require(layout.fmax_hz <= sample_rate / 2.0, "fmax exceeds Nyquist");
  layout.log_floor = cfg.log_floor;
  return layout;
}

std::size_t FrameCount(std::size_t n, int frame, int stride) {
  return 1 + (n - frame) / stride;
}

std::vector<double> PeriodicHann(int length) {
  std::vector<double> w(length);
  for (int n = 0; n < length; ++n) {
    w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / length);
  }
  return w;
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelToHz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

Eigen::MatrixXd MelFilterbank(const FrameLayout& layout) {
  const int bins = layout.num_bins();
  const double mel_lo = HzToMel(layout.fmin_hz);
  const double mel_hi = HzToMel(layout.fmax_hz);
  std::vector<double> edges(layout.n_mels + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = MelToHz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                    (layout.n_mels + 1));
  }

  Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(layout.n_mels, bins);
  for (int m = 0; m < layout.n_mels; ++m) {
    const double left = edges[m];
    const double centre = edges[m + 1];
    const double right = edges[m + 2];
    for (int k = 0; k < bins; ++k) {
      const double f = k * layout.sample_rate / layout.n_fft;
      const double rising = (f - left) / (centre - left);
      const double falling = (right - f) / (right - centre);
      fb(m, k) = std::max(0.0, std::min(rising, falling));
    }
  }
  return fb;
}

Eigen::MatrixXd FrameSignal(std::span<const double> samples,
                            const FrameLayout& layout) {
  const int frame = layout.frame_samples;
  if (samples.size() < static_cast<std::size_t>(frame)) {
    throw Error(ErrorCode::kSignalTooShort,
                std::to_string(samples.size()) +
                    " samples is shorter than one frame of " +
                    std::to_string(frame));
  }
  const auto count = FrameCount(samples.size(), frame, layout.stride_samples);
  const std::vector<double> window = PeriodicHann(frame);
  Eigen::MatrixXd framed(count, frame);
  for (std::size_t t = 0; t < count; ++t) {
    const std::size_t offset = t * layout.stride_samples;
    for (int n = 0; n < frame; ++n) {
      framed(t, n) = samples[offset + n] * window[n];
    }
  }
  return framed;
}

Eigen::MatrixXd LogMelSpectrogram(const Eigen::MatrixXd& framed,
                                  const FrameLayout& layout) {
  if (framed.cols() > layout.n_fft) {
    throw Error(ErrorCode::kConfigError,
                "frame length exceeds n_fft " + std::to_string(layout.n_fft));
  }
  const PowerSpectrumTransform transform(layout.n_fft);
  const Eigen::MatrixXd fb = MelFilterbank(layout);

  // Row-major copy so each frame is contiguous for the transform.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
      frames = framed;
  Eigen::VectorXd power(transform.num_bins());
  Eigen::MatrixXd out(framed.rows(), layout.n_mels);
  for (Eigen::Index t = 0; t < frames.rows(); ++t) {
    transform.Compute(
        std::span<const double>(frames.row(t).data(), frames.cols()),
        std::span<double>(power.data(), power.size()));
    const Eigen::VectorXd energy = fb * power;
    for (int m = 0; m < layout.n_mels; ++m) {
      out(t, m) = std::log(std::max(energy[m], layout.log_floor));
    }
  }
  return out;
}

Eigen::MatrixXd DctOrthonormal(const Eigen::MatrixXd& rows, int n_ceps) {
  const Eigen::Index m = rows.cols();
  if (n_ceps < 1 || n_ceps > m) {
    throw Error(ErrorCode::kConfigError, "n_ceps out of range for DCT");
  }
  Eigen::MatrixXd basis(m, n_ceps);
  for (int k = 0; k < n_ceps; ++k) {
    const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / m);
    for (Eigen::Index i = 0; i < m; ++i) {
      basis(i, k) =
          scale * std::cos(std::numbers::pi * k * (2.0 * i + 1.0) / (2.0 * m));
    }
  }
  return rows * basis;
}

FeatureSequence MfccSequence(const Waveform& w, const SpectralConfig& cfg) {
  const FrameLayout layout = ResolveLayout(cfg, w.sample_rate);
  const Eigen::MatrixXd framed = FrameSignal(w.samples, layout);
  FeatureSequence seq;
  seq.frames = DctOrthonormal(LogMelSpectrogram(framed, layout), layout.n_ceps);
  seq.frame_times.resize(framed.rows());
  for (Eigen::Index t = 0; t < framed.rows(); ++t) {
    seq.frame_times[t] =
        (static_cast<double>(t) * layout.stride_samples +
         layout.frame_samples / 2.0) /
        layout.sample_rate;
  }
  return seq;
}

Eigen::VectorXd BeansEmbedding(const FeatureSequence& seq) {
  const Eigen::MatrixXd& x = seq.frames;
  if (x.rows() == 0) {
    throw Error(ErrorCode::kEmptySequence, "BEANS aggregation of zero frames");
  }
  const Eigen::Index c = x.cols();
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::RowVectorXd var =
      (x.rowwise() - mean).array().square().colwise().mean();
  Eigen::VectorXd out(4 * c);
  out.segment(0, c) = mean.transpose();
  out.segment(c, c) = var.array().sqrt().transpose();
  out.segment(2 * c, c) = x.colwise().minCoeff().transpose();
  out.segment(3 * c, c) = x.colwise().maxCoeff().transpose();
  return out;
}

}  // namespace callprobe::dsp
