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

#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <vector>

#include "sawt/audio/kmeans.h"
#include "sawt/audio/mask.h"
#include "sawt/audio/mel.h"
#include "sawt/audio/wave.h"
#include "sawt/util/error.h"
#include "sawt/util/rng.h"

using namespace sawt::audio;
using sawt::util::Rng;

namespace {

// O(N^2) reference DFT for FFT verification.
std::vector<std::complex<double>> NaiveDft(
    const std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = -2.0 * M_PI * k * t / n;
      acc += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

Waveform Tone(double freq, double seconds, double amplitude = 0.5) {
  Waveform w;
  const int n = static_cast<int>(seconds * kSampleRate);
  w.samples.resize(n);
  for (int i = 0; i < n; ++i) {
    w.samples[i] = amplitude * std::sin(2.0 * M_PI * freq * i / kSampleRate);
  }
  return w;
}

}  // namespace

TEST_CASE("fft matches naive dft") {
  Rng rng(3);
  std::vector<std::complex<double>> x(256);
  for (auto& v : x) v = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
  auto fast = x;
  Fft(fast, false);
  const auto slow = NaiveDft(x);
  for (std::size_t k = 0; k < x.size(); ++k) {
    CHECK(std::abs(fast[k] - slow[k]) < 1e-9);
  }
  // Inverse round-trip.
  Fft(fast, true);
  for (std::size_t k = 0; k < x.size(); ++k) {
    CHECK(std::abs(fast[k] - x[k]) < 1e-9);
  }
}

TEST_CASE("wave round-trip and mono mixdown") {
  Waveform w = Tone(440.0, 0.1);
  SaveWave("wave_test.wav", w);
  const Waveform back = LoadWave("wave_test.wav");
  REQUIRE(back.samples.size() == w.samples.size());
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    CHECK(back.samples[i] == doctest::Approx(w.samples[i]).epsilon(1e-3));
  }
  std::remove("wave_test.wav");
  CHECK_THROWS_AS(LoadWave("no_such_file.wav"), sawt::Error);
}

TEST_CASE("one second of silence is 16000 zero samples") {
  Waveform w;
  w.samples.assign(16000, 0.0);
  SaveWave("silence_test.wav", w);
  const Waveform back = LoadWave("silence_test.wav");
  CHECK(back.samples.size() == 16000);
  for (const double s : back.samples) CHECK(s == 0.0);
  std::remove("silence_test.wav");
}

TEST_CASE("mel frame count: 1 s at 25 ms / 10 ms gives 98 frames") {
  const MelConfig cfg;
  CHECK(MelFrameCount(16000, cfg) == 98);
  const auto mel = LogMel(Tone(440.0, 1.0), cfg);
  CHECK(mel.num_frames() == 98);
  CHECK(mel.num_bins() == 80);
}

TEST_CASE("zero waveform hits the log floor everywhere") {
  Waveform w;
  w.samples.assign(4000, 0.0);
  const MelConfig cfg;
  const auto mel = LogMel(w, cfg);
  const double floor_val = std::log(cfg.log_floor);
  CHECK((mel.frames.array() == floor_val).all());
}

TEST_CASE("too-short waveform raises") {
  Waveform w;
  w.samples.assign(100, 0.0);
  CHECK_THROWS_AS(LogMel(w, MelConfig{}), sawt::Error);
}

TEST_CASE("pure tone has a constant argmax bin that matches a DFT oracle") {
  const MelConfig cfg;
  const Waveform tone = Tone(440.0, 0.5);
  const auto mel = LogMel(tone, cfg);

  // Oracle: naive DFT of each windowed frame through the same filterbank.
  const Eigen::MatrixXd fb = MelFilterbank(cfg);
  const int win = cfg.window_samples();
  const int hop = cfg.hop_samples();
  int first_argmax = -1;
  for (int t = 0; t < mel.num_frames(); ++t) {
    std::vector<std::complex<double>> frame(cfg.fft_size, {0.0, 0.0});
    for (int i = 0; i < win; ++i) {
      const double hann = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / win);
      frame[i] = tone.samples[t * hop + i] * hann;
    }
    const auto spec = NaiveDft(frame);
    Eigen::VectorXd power(cfg.fft_size / 2 + 1);
    for (int k = 0; k <= cfg.fft_size / 2; ++k) power[k] = std::norm(spec[k]);
    const Eigen::VectorXd oracle =
        ((fb * power).array() + cfg.log_floor).log();

    int impl_argmax, oracle_argmax;
    mel.frames.row(t).maxCoeff(&impl_argmax);
    oracle.maxCoeff(&oracle_argmax);
    CHECK(impl_argmax == oracle_argmax);
    if (t == 0) first_argmax = impl_argmax;
    CHECK(impl_argmax == first_argmax);
    CHECK((mel.frames.row(t).transpose() - oracle).cwiseAbs().maxCoeff() <
          1e-9);
  }
}

TEST_CASE("mel is shift-covariant by one hop") {
  const MelConfig cfg;
  Rng rng(11);
  Waveform w;
  w.samples.resize(8000);
  for (auto& s : w.samples) s = rng.uniform(-0.5, 0.5);
  const auto full = LogMel(w, cfg);
  Waveform shifted;
  shifted.samples.assign(w.samples.begin() + cfg.hop_samples(),
                         w.samples.end());
  const auto sub = LogMel(shifted, cfg);
  CHECK(sub.num_frames() == full.num_frames() - 1);
  for (int t = 0; t < sub.num_frames(); ++t) {
    CHECK((sub.frames.row(t) - full.frames.row(t + 1)).cwiseAbs().maxCoeff() <
          1e-12);
  }
}

TEST_CASE("kmeans with k=1 returns the mean") {
  Rng rng(5);
  Eigen::MatrixXd pts(50, 3);
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 3; ++j) pts(i, j) = rng.uniform(-2, 2);
  const auto result = FitKMeans(pts, 1, 42);
  const Eigen::RowVectorXd mean = pts.colwise().mean();
  CHECK((result.model.centroids.row(0) - mean).norm() < 1e-9);
}

TEST_CASE("kmeans separates two gaussian blobs") {
  Rng rng(17);
  Eigen::MatrixXd pts(200, 2);
  for (int i = 0; i < 200; ++i) {
    const double cx = i < 100 ? -5.0 : 5.0;
    pts(i, 0) = cx + rng.normal(0, 0.3);
    pts(i, 1) = rng.normal(0, 0.3);
  }
  const auto result = FitKMeans(pts, 2, 1);
  // Brute-force nearest-centroid oracle must agree with blob membership.
  const auto oracle = NearestCentroids(result.model.centroids, pts);
  CHECK(oracle == result.assignments);
  for (int i = 1; i < 100; ++i) CHECK(result.assignments[i] == result.assignments[0]);
  for (int i = 101; i < 200; ++i) CHECK(result.assignments[i] == result.assignments[100]);
  CHECK(result.assignments[0] != result.assignments[100]);
}

TEST_CASE("kmeans with k=n gives zero inertia") {
  Eigen::MatrixXd pts(6, 2);
  pts << 0, 0, 1, 0, 2, 0, 0, 1, 1, 1, 2, 1;
  const auto result = FitKMeans(pts, 6, 9);
  CHECK(result.inertia == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("kmeans inertia history is non-increasing") {
  Rng rng(23);
  Eigen::MatrixXd pts(300, 4);
  for (int i = 0; i < 300; ++i)
    for (int j = 0; j < 4; ++j) pts(i, j) = rng.normal();
  const auto result = FitKMeans(pts, 8, 77);
  for (std::size_t i = 1; i < result.inertia_history.size(); ++i) {
    CHECK(result.inertia_history[i] <= result.inertia_history[i - 1] + 1e-9);
  }
}

TEST_CASE("kmeans is deterministic and rejects too-few points") {
  Rng rng(31);
  Eigen::MatrixXd pts(40, 2);
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 2; ++j) pts(i, j) = rng.uniform(-1, 1);
  const auto a = FitKMeans(pts, 5, 123);
  const auto b = FitKMeans(pts, 5, 123);
  CHECK(a.model.centroids == b.model.centroids);
  CHECK_THROWS_AS(FitKMeans(pts.topRows(3), 5, 1), sawt::Error);
  // Repeated rows do not count as distinct points.
  Eigen::MatrixXd dup(4, 2);
  dup << 1, 1, 1, 1, 1, 1, 2, 2;
  CHECK_THROWS_AS(FitKMeans(dup, 3, 1), sawt::Error);
}

TEST_CASE("cluster model serialization round-trips") {
  Eigen::MatrixXd c(3, 4);
  c << 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12;
  const ClusterModel model{c, 0.02};
  model.Save("kmeans_test.bin");
  const ClusterModel back = ClusterModel::Load("kmeans_test.bin");
  CHECK(back.num_clusters() == 3);
  CHECK(back.feature_dims() == 4);
  CHECK(back.feature_hop_sec == 0.02);
  CHECK((back.centroids - c).cwiseAbs().maxCoeff() < 1e-6);
  std::remove("kmeans_test.bin");
}

TEST_CASE("assign_labels uses nearest centroid with low-index ties") {
  Eigen::MatrixXd c(2, 2);
  c << 0, 0, 2, 0;
  const ClusterModel model{c, 0.02};
  MelSpectrogram mel;
  mel.config.mel_bins = 2;
  mel.frames.resize(3, 2);
  mel.frames << 0.1, 0.0,  // nearest c0
      1.0, 0.0,            // equidistant -> c0 by the tie rule
      1.9, 0.0;            // nearest c1
  const auto labels = AssignLabels(model, mel);
  // Frames decimate by 2: rows 0 and 2 remain.
  REQUIRE(labels.size() == 2);
  CHECK(labels[0] == 0);
  CHECK(labels[1] == 1);

  const auto direct = NearestCentroids(c, mel.frames);
  CHECK(direct[1] == 0);  // tie goes to the lower index
}

TEST_CASE("assign_labels equals exhaustive search on random frames") {
  Rng rng(41);
  Eigen::MatrixXd c(7, 5);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 5; ++j) c(i, j) = rng.normal();
  Eigen::MatrixXd rows(100, 5);
  for (int i = 0; i < 100; ++i)
    for (int j = 0; j < 5; ++j) rows(i, j) = rng.normal();
  const auto fast = NearestCentroids(c, rows);
  for (int i = 0; i < 100; ++i) {
    double best = 1e300;
    int best_k = 0;
    for (int k = 0; k < 7; ++k) {
      const double d = (rows.row(i) - c.row(k)).squaredNorm();
      if (d < best) {
        best = d;
        best_k = k;
      }
    }
    CHECK(fast[i] == best_k);
  }
  CHECK_THROWS_AS(NearestCentroids(c, Eigen::MatrixXd::Zero(2, 3)), sawt::Error);
}

TEST_CASE("mask sampling respects bounds, disjointness, and clipping") {
  Rng rng(53);
  for (int trial = 0; trial < 1000; ++trial) {
    const int total = rng.uniform_int(1, 80);
    Rng draw = rng.child("draw" + std::to_string(trial));
    const auto spec = SampleMaskSpans(total, 10, 0.2, draw);
    int prev_end = -1;
    for (const auto& [start, len] : spec.spans) {
      CHECK(start >= prev_end);  // sorted and disjoint
      CHECK(len >= 1);
      CHECK(len <= 10);
      CHECK(start + len <= total);
      prev_end = start + len;
    }
  }
}

TEST_CASE("mask start at the end clips to the sequence") {
  // Force a single span by probability 1 on a 5-frame sequence.
  Rng rng(1);
  const auto spec = SampleMaskSpans(5, 10, 1.0, rng);
  CHECK(spec.masked_count() == 5);
  REQUIRE(spec.spans.size() == 1);
  CHECK(spec.spans[0] == std::pair<int, int>{0, 5});
}

TEST_CASE("zero start probability masks nothing") {
  Rng rng(1);
  const auto spec = SampleMaskSpans(100, 10, 0.0, rng);
  CHECK(spec.spans.empty());
  CHECK(spec.masked_count() == 0);
}

TEST_CASE("masked fraction matches the analytic coverage formula") {
  // P(frame masked) = 1 - (1-p)^span for frames away from the left edge.
  const double p = 0.065;
  const int span = 10;
  const int total = 2000;
  const double expected = 1.0 - std::pow(1.0 - p, span);
  Rng rng(20260112);
  double sum_fraction = 0.0;
  const int draws = 2000;
  for (int i = 0; i < draws; ++i) {
    const auto spec = SampleMaskSpans(total, span, p, rng);
    sum_fraction += static_cast<double>(spec.masked_count()) / total;
  }
  CHECK(sum_fraction / draws == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("label count tracks decimated mel frames") {
  const MelConfig cfg;
  CHECK(LabelCount(16000, cfg) == 49);  // 98 mel frames -> 49 labels
  CHECK(LabelCount(8000, cfg) == 24);   // 48 mel frames -> 24 labels
}
