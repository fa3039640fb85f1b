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

#include "sawt/audio/kmeans.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>

#include "sawt/util/error.h"
#include "sawt/util/rng.h"

namespace sawt::audio {

namespace {

constexpr char kMagic[8] = {'S', 'A', 'W', 'T', 'K', 'M', 'S', '1'};
constexpr int kMaxIterations = 100;
constexpr double kShiftTolerance = 1e-6;

double SquaredDistance(const Eigen::MatrixXd& a, int i,
                       const Eigen::MatrixXd& b, int j) {
  return (a.row(i) - b.row(j)).squaredNorm();
}

int CountDistinctRows(const Eigen::MatrixXd& m) {
  std::set<std::vector<double>> rows;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> r(m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j) r[j] = m(i, j);
    rows.insert(std::move(r));
  }
  return static_cast<int>(rows.size());
}

}  // namespace

void ClusterModel::Validate() const {
  if (num_clusters() < 1) {
    throw DataError("InvalidModel", "cluster model needs K >= 1");
  }
  if (!centroids.allFinite()) {
    throw NumericError("InvalidModel", "cluster centroids are not finite");
  }
  for (int i = 0; i < num_clusters(); ++i) {
    for (int j = i + 1; j < num_clusters(); ++j) {
      if ((centroids.row(i) - centroids.row(j)).norm() <= 1e-9) {
        throw DataError("InvalidModel",
                        "duplicate centroids " + std::to_string(i) + " and " +
                            std::to_string(j));
      }
    }
  }
}

std::vector<int> NearestCentroids(const Eigen::MatrixXd& centroids,
                                  const Eigen::MatrixXd& rows) {
  if (centroids.cols() != rows.cols()) {
    throw DataError("DimMismatch",
                    "centroid dims " + std::to_string(centroids.cols()) +
                        " != feature dims " + std::to_string(rows.cols()));
  }
  std::vector<int> out(rows.rows());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_k = 0;
    for (Eigen::Index k = 0; k < centroids.rows(); ++k) {
      const double d = SquaredDistance(rows, static_cast<int>(i), centroids,
                                       static_cast<int>(k));
      if (d < best) {
        best = d;
        best_k = static_cast<int>(k);
      }
    }
    out[i] = best_k;
  }
  return out;
}

KMeansResult FitKMeans(const Eigen::MatrixXd& features, int k,
                       std::uint64_t seed, double feature_hop_sec) {
  const int n = static_cast<int>(features.rows());
  const int d = static_cast<int>(features.cols());
  if (k < 1 || n < k || CountDistinctRows(features) < k) {
    throw DataError("TooFewPoints",
                    "need at least k=" + std::to_string(k) +
                        " distinct points, got " + std::to_string(n) + " rows");
  }
  if (!features.allFinite()) {
    throw NumericError("NonFinite", "k-means features are not finite");
  }

  util::Rng rng(seed);
  Eigen::MatrixXd centroids(k, d);

  // k-means++ seeding.
  std::vector<double> dist2(n, std::numeric_limits<double>::infinity());
  centroids.row(0) = features.row(rng.uniform_int(n));
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      dist2[i] = std::min(dist2[i],
                          SquaredDistance(features, i, centroids, c - 1));
      total += dist2[i];
    }
    // total > 0 is guaranteed by the distinct-rows precondition.
    double target = rng.uniform() * total;
    int chosen = n - 1;
    for (int i = 0; i < n; ++i) {
      target -= dist2[i];
      if (target <= 0.0) {
        chosen = i;
        break;
      }
    }
    centroids.row(c) = features.row(chosen);
  }

  KMeansResult result;
  std::vector<int> assign(n, -1);
  double prev_inertia = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    // Assignment step.
    double inertia = 0.0;
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int best_k = 0;
      for (int c = 0; c < k; ++c) {
        const double dd = SquaredDistance(features, i, centroids, c);
        if (dd < best) {
          best = dd;
          best_k = c;
        }
      }
      assign[i] = best_k;
      inertia += best;
    }
    if (inertia > prev_inertia + 1e-9 * (1.0 + prev_inertia)) {
      throw NumericError("KMeansDiverged",
                         "inertia increased across Lloyd iterations");
    }
    prev_inertia = inertia;
    result.inertia_history.push_back(inertia);
    result.iterations = iter + 1;

    // Update step.
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, d);
    std::vector<int> counts(k, 0);
    for (int i = 0; i < n; ++i) {
      sums.row(assign[i]) += features.row(i);
      ++counts[assign[i]];
    }
    // Empty clusters grab the point farthest from its own centroid.
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      double worst = -1.0;
      int worst_i = 0;
      for (int i = 0; i < n; ++i) {
        if (counts[assign[i]] <= 1) continue;
        const double dd = SquaredDistance(features, i, centroids, assign[i]);
        if (dd > worst) {
          worst = dd;
          worst_i = i;
        }
      }
      --counts[assign[worst_i]];
      sums.row(assign[worst_i]) -= features.row(worst_i);
      assign[worst_i] = c;
      counts[c] = 1;
      sums.row(c) = features.row(worst_i);
    }

    double max_shift = 0.0;
    for (int c = 0; c < k; ++c) {
      const Eigen::RowVectorXd updated = sums.row(c) / counts[c];
      max_shift = std::max(max_shift, (updated - centroids.row(c)).norm());
      centroids.row(c) = updated;
    }
    if (max_shift < kShiftTolerance) break;
  }

  // Final inertia under the converged centroids.
  result.assignments = NearestCentroids(centroids, features);
  result.inertia = 0.0;
  for (int i = 0; i < n; ++i) {
    result.inertia += SquaredDistance(features, i, centroids, result.assignments[i]);
  }
  result.model = ClusterModel{std::move(centroids), feature_hop_sec};
  result.model.Validate();
  return result;
}

std::vector<int> AssignLabels(const ClusterModel& model,
                              const MelSpectrogram& mel) {
  if (model.feature_dims() != mel.num_bins()) {
    throw DataError("DimMismatch",
                    "model dims " + std::to_string(model.feature_dims()) +
                        " != mel bins " + std::to_string(mel.num_bins()));
  }
  const int kept = (mel.num_frames() + kLabelDecimation - 1) / kLabelDecimation;
  Eigen::MatrixXd rows(kept, mel.num_bins());
  for (int i = 0; i < kept; ++i) rows.row(i) = mel.frames.row(i * kLabelDecimation);
  return NearestCentroids(model.centroids, rows);
}

int LabelCount(std::size_t samples, const MelConfig& cfg) {
  const int mel_frames = MelFrameCount(samples, cfg);
  return (mel_frames + kLabelDecimation - 1) / kLabelDecimation;
}

void ClusterModel::Save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("FileNotFound", "cannot write " + path);
  out.write(kMagic, 8);
  const std::uint32_t version = 1;
  const std::uint32_t k = static_cast<std::uint32_t>(num_clusters());
  const std::uint32_t d = static_cast<std::uint32_t>(feature_dims());
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(&k), 4);
  out.write(reinterpret_cast<const char*>(&d), 4);
  out.write(reinterpret_cast<const char*>(&feature_hop_sec), 8);
  for (std::uint32_t i = 0; i < k; ++i) {
    for (std::uint32_t j = 0; j < d; ++j) {
      const float v = static_cast<float>(centroids(i, j));
      out.write(reinterpret_cast<const char*>(&v), 4);
    }
  }
}

ClusterModel ClusterModel::Load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("FileNotFound", "cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) {
    throw DataError("UnsupportedFormat", path + ": bad cluster model magic");
  }
  std::uint32_t version = 0, k = 0, d = 0;
  double hop = 0.0;
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(&k), 4);
  in.read(reinterpret_cast<char*>(&d), 4);
  in.read(reinterpret_cast<char*>(&hop), 8);
  if (!in || version != 1) {
    throw DataError("UnsupportedFormat", path + ": unsupported version");
  }
  ClusterModel model;
  model.feature_hop_sec = hop;
  model.centroids.resize(k, d);
  for (std::uint32_t i = 0; i < k; ++i) {
    for (std::uint32_t j = 0; j < d; ++j) {
      float v;
      in.read(reinterpret_cast<char*>(&v), 4);
      model.centroids(i, j) = v;
    }
  }
  if (!in) throw DataError("ParseError", path + ": truncated cluster model");
  model.Validate();
  return model;
}

}  // namespace sawt::audio
