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

#ifndef SAWT_AUDIO_MEL_H_
#define SAWT_AUDIO_MEL_H_

#include <complex>
#include <vector>

#include <Eigen/Core>

#include "sawt/audio/wave.h"

namespace sawt::audio {

struct MelConfig {
  int sample_rate = kSampleRate;
  double window_sec = 0.025;
  double hop_sec = 0.010;
  int fft_size = 1024;
  int mel_bins = 80;
  double fmin_hz = 0.0;
  double fmax_hz = 8000.0;
  double log_floor = 1e-6;

  int window_samples() const {
    return static_cast<int>(window_sec * sample_rate + 0.5);
  }
  int hop_samples() const {
    return static_cast<int>(hop_sec * sample_rate + 0.5);
  }
};

// T x mel_bins matrix of log mel-filterbank energies.
struct MelSpectrogram {
  Eigen::MatrixXd frames;
  MelConfig config;

  int num_frames() const { return static_cast<int>(frames.rows()); }
  int num_bins() const { return static_cast<int>(frames.cols()); }
};

// floor((samples - window) / hop) + 1; negative counts clamp to 0.
int MelFrameCount(std::size_t samples, const MelConfig& cfg);

// Log mel spectrogram: Hann window, |FFT|^2, triangular mel filters,
// log(x + log_floor). Throws TooShort when the input is under one window.
MelSpectrogram LogMel(const Waveform& wave, const MelConfig& cfg = {});

// mel_bins x (fft_size/2 + 1) triangular filterbank on the HTK mel scale.
Eigen::MatrixXd MelFilterbank(const MelConfig& cfg);

double HzToMel(double hz);
double MelToHz(double mel);

// In-place radix-2 FFT; size must be a power of two.
void Fft(std::vector<std::complex<double>>& a, bool inverse);

}  // namespace sawt::audio

#endif  // SAWT_AUDIO_MEL_H_
