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

#include "sawt/nn/adam.h"

#include <cmath>
#include <cstring>
#include <fstream>

#include "sawt/util/error.h"

namespace sawt::nn {

double ScheduledLr(const AdamConfig& config, int step) {
  if (step < 1) step = 1;
  const double warmup = std::max(1, config.warmup_updates);
  const double ramp = std::min(1.0, static_cast<double>(step) / warmup);
  if (config.schedule == LrSchedule::kConstant) return config.lr * ramp;
  return config.lr *
         std::min(ramp, std::sqrt(warmup / static_cast<double>(step)));
}

AdamOptimizer::AdamOptimizer(ParamStore& params, AdamConfig config)
    : params_(&params), config_(config) {
  for (const auto& p : params_->items()) {
    m_.push_back(Mat::Zero(p->value.rows(), p->value.cols()));
    v_.push_back(Mat::Zero(p->value.rows(), p->value.cols()));
  }
}

void AdamOptimizer::SetFrozenPrefixes(std::vector<std::string> prefixes) {
  frozen_prefixes_ = std::move(prefixes);
}

bool AdamOptimizer::Frozen(const std::string& name) const {
  for (const auto& prefix : frozen_prefixes_) {
    if (name.rfind(prefix, 0) == 0) return true;
  }
  return false;
}

double AdamOptimizer::Step() {
  ++step_;
  const double lr = ScheduledLr(config_, step_);

  if (config_.clip_norm > 0.0) {
    double total_sq = 0.0;
    for (std::size_t i = 0; i < params_->items().size(); ++i) {
      const auto& p = params_->items()[i];
      if (Frozen(p->name)) continue;
      total_sq += p->grad.squaredNorm();
    }
    const double norm = std::sqrt(total_sq);
    if (norm > config_.clip_norm) {
      const double scale = config_.clip_norm / norm;
      for (const auto& p : params_->items()) {
        if (!Frozen(p->name)) p->grad *= scale;
      }
    }
  }

  const double bc1 = 1.0 - std::pow(config_.beta1, step_);
  const double bc2 = 1.0 - std::pow(config_.beta2, step_);
  for (std::size_t i = 0; i < params_->items().size(); ++i) {
    auto& p = *params_->items()[i];
    if (Frozen(p.name)) {
      p.ZeroGrad();
      continue;
    }
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * p.grad;
    v_[i] = config_.beta2 * v_[i] +
            (1.0 - config_.beta2) * p.grad.cwiseProduct(p.grad);
    const Mat m_hat = m_[i] / bc1;
    const Mat v_hat = v_[i] / bc2;
    p.value -= lr * (m_hat.array() / (v_hat.array().sqrt() + config_.eps)).matrix();
    p.ZeroGrad();
  }
  return lr;
}

void AdamOptimizer::SaveState(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("FileNotFound", "cannot write optimizer state");
  const char magic[8] = {'S', 'A', 'W', 'T', 'A', 'D', 'M', '1'};
  out.write(magic, 8);
  const std::uint64_t step = static_cast<std::uint64_t>(step_);
  out.write(reinterpret_cast<const char*>(&step), 8);
  const std::uint64_t count = m_.size();
  out.write(reinterpret_cast<const char*>(&count), 8);
  auto write_mat = [&](const Mat& m) {
    const std::uint64_t r = m.rows(), c = m.cols();
    out.write(reinterpret_cast<const char*>(&r), 8);
    out.write(reinterpret_cast<const char*>(&c), 8);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const double v = m(i, j);
        out.write(reinterpret_cast<const char*>(&v), 8);
      }
    }
  };
  for (std::size_t i = 0; i < m_.size(); ++i) {
    write_mat(m_[i]);
    write_mat(v_[i]);
  }
}

void AdamOptimizer::LoadState(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("FileNotFound", "cannot open optimizer state");
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, "SAWTADM1", 8) != 0) {
    throw DataError("UnsupportedFormat", path + ": bad optimizer state magic");
  }
  std::uint64_t step = 0, count = 0;
  in.read(reinterpret_cast<char*>(&step), 8);
  in.read(reinterpret_cast<char*>(&count), 8);
  if (count != m_.size()) {
    throw DataError("ParseError", "optimizer state parameter count mismatch");
  }
  auto read_mat = [&](Mat& m) {
    std::uint64_t r = 0, c = 0;
    in.read(reinterpret_cast<char*>(&r), 8);
    in.read(reinterpret_cast<char*>(&c), 8);
    m.resize(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        double v;
        in.read(reinterpret_cast<char*>(&v), 8);
        m(i, j) = v;
      }
    }
  };
  for (std::size_t i = 0; i < count; ++i) {
    read_mat(m_[i]);
    read_mat(v_[i]);
  }
  if (!in) throw DataError("ParseError", path + ": truncated optimizer state");
  step_ = static_cast<int>(step);
}

}  // namespace sawt::nn
