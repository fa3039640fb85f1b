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

#ifndef SAWT_AUDIO_KMEANS_H_
#define SAWT_AUDIO_KMEANS_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sawt/audio/mel.h"

namespace sawt::audio {

// Discrete-unit targets run at half the mel frame rate (20 ms) so that unit
// sequences line up with the speech pre-net output.
constexpr int kLabelDecimation = 2;

struct ClusterModel {
  Eigen::MatrixXd centroids;  // K x D
  double feature_hop_sec = 0.02;

  int num_clusters() const { return static_cast<int>(centroids.rows()); }
  int feature_dims() const { return static_cast<int>(centroids.cols()); }

  void Validate() const;  // finite, K >= 1, no duplicate centroids
  void Save(const std::string& path) const;
  static ClusterModel Load(const std::string& path);
};

struct KMeansResult {
  ClusterModel model;
  std::vector<int> assignments;
  double inertia = 0.0;
  int iterations = 0;
  std::vector<double> inertia_history;  // one entry per Lloyd iteration
};

// Lloyd's algorithm with k-means++ seeding. Deterministic for a fixed seed;
// stops when the max centroid shift drops below 1e-6 or after 100
// iterations. Throws TooFewPoints when there are fewer than k distinct rows.
KMeansResult FitKMeans(const Eigen::MatrixXd& features, int k,
                       std::uint64_t seed, double feature_hop_sec = 0.02);

// Nearest centroid per row, ties broken toward the lowest index.
std::vector<int> NearestCentroids(const Eigen::MatrixXd& centroids,
                                  const Eigen::MatrixXd& rows);

// Frame labels for an utterance: mel frames are decimated by
// kLabelDecimation, then each kept frame is assigned its nearest centroid.
// Throws DimMismatch when model dims != mel bins.
std::vector<int> AssignLabels(const ClusterModel& model,
                              const MelSpectrogram& mel);

// Number of unit labels produced for a waveform of `samples` samples.
int LabelCount(std::size_t samples, const MelConfig& cfg = {});

}  // namespace sawt::audio

#endif  // SAWT_AUDIO_KMEANS_H_
