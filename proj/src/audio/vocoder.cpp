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

#include "sawt/audio/vocoder.h"

#include <cmath>
#include <complex>
#include <vector>

#include "sawt/util/error.h"

namespace sawt::audio {

namespace {

using Spectrogram = std::vector<std::vector<std::complex<double>>>;

std::vector<double> HannWindow(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / n);
  return w;
}

Spectrogram Stft(const std::vector<double>& x, const MelConfig& cfg) {
  const int win = cfg.window_samples();
  const int hop = cfg.hop_samples();
  const int frames = MelFrameCount(x.size(), cfg);
  const auto window = HannWindow(win);
  Spectrogram spec(frames);
  std::vector<std::complex<double>> buf(cfg.fft_size);
  for (int t = 0; t < frames; ++t) {
    for (int i = 0; i < win; ++i) buf[i] = x[t * hop + i] * window[i];
    std::fill(buf.begin() + win, buf.end(), std::complex<double>(0, 0));
    Fft(buf, false);
    spec[t].assign(buf.begin(), buf.begin() + cfg.fft_size / 2 + 1);
  }
  return spec;
}

std::vector<double> Istft(const Spectrogram& spec, const MelConfig& cfg,
                          std::size_t out_len) {
  const int win = cfg.window_samples();
  const int hop = cfg.hop_samples();
  const auto window = HannWindow(win);
  std::vector<double> out(out_len, 0.0);
  std::vector<double> norm(out_len, 0.0);
  std::vector<std::complex<double>> buf(cfg.fft_size);
  for (std::size_t t = 0; t < spec.size(); ++t) {
    for (int k = 0; k <= cfg.fft_size / 2; ++k) {
      buf[k] = spec[t][k];
      if (k > 0 && k < cfg.fft_size / 2) {
        buf[cfg.fft_size - k] = std::conj(spec[t][k]);
      }
    }
    Fft(buf, true);
    const std::size_t off = t * hop;
    for (int i = 0; i < win && off + i < out_len; ++i) {
      out[off + i] += buf[i].real() * window[i];
      norm[off + i] += window[i] * window[i];
    }
  }
  for (std::size_t i = 0; i < out_len; ++i) {
    if (norm[i] > 1e-8) out[i] /= norm[i];
  }
  return out;
}

}  // namespace

Waveform GriffinLimVocoder::Vocode(const MelSpectrogram& mel) const {
  if (mel.num_bins() != config_.mel_bins) {
    throw DataError("DimMismatch", "mel bins do not match the vocoder config");
  }
  const int frames = mel.num_frames();
  const int n_bins = config_.fft_size / 2 + 1;
  const Eigen::MatrixXd fb = MelFilterbank(config_);

  // Undo the log and spread each mel band back over its FFT bins
  // (row-normalized transpose as the pseudo-inverse).
  Eigen::MatrixXd fb_norm = fb;
  for (int m = 0; m < fb.rows(); ++m) {
    const double sum = fb.row(m).sum();
    if (sum > 0) fb_norm.row(m) /= sum;
  }
  Eigen::MatrixXd magnitude(frames, n_bins);
  for (int t = 0; t < frames; ++t) {
    Eigen::VectorXd mel_power =
        (mel.frames.row(t).array().exp() - config_.log_floor).max(0.0);
    magnitude.row(t) = (fb_norm.transpose() * mel_power)
                           .cwiseMax(0.0)
                           .cwiseSqrt()
                           .transpose();
  }

  const int win = config_.window_samples();
  const int hop = config_.hop_samples();
  const std::size_t out_len =
      static_cast<std::size_t>(frames - 1) * hop + win;

  // Zero-phase start keeps reconstruction deterministic.
  Spectrogram spec(frames,
                   std::vector<std::complex<double>>(n_bins, {0.0, 0.0}));
  for (int t = 0; t < frames; ++t) {
    for (int k = 0; k < n_bins; ++k) spec[t][k] = magnitude(t, k);
  }

  std::vector<double> x = Istft(spec, config_, out_len);
  for (int iter = 0; iter < iterations_; ++iter) {
    Spectrogram est = Stft(x, config_);
    for (std::size_t t = 0; t < est.size(); ++t) {
      for (int k = 0; k < n_bins; ++k) {
        const double mag = std::abs(est[t][k]);
        const std::complex<double> phase =
            mag > 1e-12 ? est[t][k] / mag : std::complex<double>(1.0, 0.0);
        est[t][k] = magnitude(static_cast<int>(t), k) * phase;
      }
    }
    x = Istft(est, config_, out_len);
  }

  double peak = 1e-9;
  for (const double s : x) peak = std::max(peak, std::abs(s));
  const double gain = peak > 0.9 ? 0.9 / peak : 1.0;
  Waveform out;
  out.samples.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out.samples[i] = x[i] * gain;
  return out;
}

}  // namespace sawt::audio
