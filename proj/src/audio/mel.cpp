// Copyright 2026 the sawt authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sawt/audio/mel.h"

#include <cmath>

#include "sawt/util/error.h"

namespace sawt::audio {

void Fft(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw NumericError("FftSize", "FFT size must be a power of two, got " +
                                      std::to_string(n));
  }
  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * M_PI / len * (inverse ? 1.0 : -1.0);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const auto u = a[i + k];
        const auto v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    for (auto& x : a) x /= static_cast<double>(n);
  }
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelToHz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

Eigen::MatrixXd MelFilterbank(const MelConfig& cfg) {
  const int n_bins = cfg.fft_size / 2 + 1;
  const double mel_lo = HzToMel(cfg.fmin_hz);
  const double mel_hi = HzToMel(cfg.fmax_hz);
  std::vector<double> edges(cfg.mel_bins + 2);
  for (int i = 0; i < cfg.mel_bins + 2; ++i) {
    edges[i] =
        MelToHz(mel_lo + (mel_hi - mel_lo) * i / (cfg.mel_bins + 1));
  }
  Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(cfg.mel_bins, n_bins);
  const double bin_hz = static_cast<double>(cfg.sample_rate) / cfg.fft_size;
  for (int m = 0; m < cfg.mel_bins; ++m) {
    const double left = edges[m], center = edges[m + 1], right = edges[m + 2];
    for (int k = 0; k < n_bins; ++k) {
      const double f = k * bin_hz;
      if (f <= left || f >= right) continue;
      fb(m, k) = f <= center ? (f - left) / (center - left)
                             : (right - f) / (right - center);
    }
  }
  return fb;
}

int MelFrameCount(std::size_t samples, const MelConfig& cfg) {
  const int win = cfg.window_samples();
  const int hop = cfg.hop_samples();
  if (samples < static_cast<std::size_t>(win)) return 0;
  return static_cast<int>((samples - win) / hop) + 1;
}

MelSpectrogram LogMel(const Waveform& wave, const MelConfig& cfg) {
  const int win = cfg.window_samples();
  const int hop = cfg.hop_samples();
  const int n_frames = MelFrameCount(wave.samples.size(), cfg);
  if (n_frames == 0) {
    throw DataError("TooShort",
                    "waveform of " + std::to_string(wave.samples.size()) +
                        " samples is shorter than one window (" +
                        std::to_string(win) + ")");
  }
  if (win > cfg.fft_size) {
    throw NumericError("FftSize", "window exceeds FFT size");
  }

  std::vector<double> window(win);
  for (int i = 0; i < win; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / win);
  }

  const Eigen::MatrixXd fb = MelFilterbank(cfg);
  const int n_bins = cfg.fft_size / 2 + 1;
  Eigen::MatrixXd frames(n_frames, cfg.mel_bins);
  std::vector<std::complex<double>> buf(cfg.fft_size);
  Eigen::VectorXd power(n_bins);
  for (int t = 0; t < n_frames; ++t) {
    const int off = t * hop;
    for (int i = 0; i < win; ++i) {
      buf[i] = wave.samples[off + i] * window[i];
    }
    std::fill(buf.begin() + win, buf.end(), std::complex<double>(0.0, 0.0));
    Fft(buf, false);
    for (int k = 0; k < n_bins; ++k) power[k] = std::norm(buf[k]);
    frames.row(t) =
        ((fb * power).array() + cfg.log_floor).log().transpose();
  }
  return MelSpectrogram{std::move(frames), cfg};
}

}  // namespace sawt::audio
