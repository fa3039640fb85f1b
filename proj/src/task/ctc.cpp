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

#include "sawt/task/ctc.h"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <map>

#include "sawt/text/tokenizer.h"
#include "sawt/util/error.h"

namespace sawt::task {

using nn::Mat;
using nn::Tensor;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double LogAdd(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-(std::abs(a - b))));
}

struct ForwardBackward {
  Mat alpha, beta;   // T x S, emission-inclusive
  double log_z = kNegInf;
  std::vector<int> extended;  // blank-interleaved target labels
};

ForwardBackward RunForwardBackward(const Mat& lp, const std::vector<int>& target,
                                   int blank) {
  const Eigen::Index t_len = lp.rows();
  const int s_len = 2 * static_cast<int>(target.size()) + 1;
  ForwardBackward fb;
  fb.extended.resize(s_len);
  for (int s = 0; s < s_len; ++s) {
    fb.extended[s] = (s % 2 == 0) ? blank : target[s / 2];
  }
  auto allow_skip = [&](int s) {
    // Skip from s-2 is legal when the label is not blank and differs from
    // the label two states back (the repeat rule).
    return s >= 2 && fb.extended[s] != blank &&
           fb.extended[s] != fb.extended[s - 2];
  };

  fb.alpha = Mat::Constant(t_len, s_len, kNegInf);
  fb.alpha(0, 0) = lp(0, fb.extended[0]);
  if (s_len > 1) fb.alpha(0, 1) = lp(0, fb.extended[1]);
  for (Eigen::Index t = 1; t < t_len; ++t) {
    for (int s = 0; s < s_len; ++s) {
      double acc = fb.alpha(t - 1, s);
      if (s >= 1) acc = LogAdd(acc, fb.alpha(t - 1, s - 1));
      if (allow_skip(s)) acc = LogAdd(acc, fb.alpha(t - 1, s - 2));
      fb.alpha(t, s) = acc == kNegInf ? kNegInf : acc + lp(t, fb.extended[s]);
    }
  }
  fb.log_z = fb.alpha(t_len - 1, s_len - 1);
  if (s_len > 1) fb.log_z = LogAdd(fb.log_z, fb.alpha(t_len - 1, s_len - 2));

  fb.beta = Mat::Constant(t_len, s_len, kNegInf);
  fb.beta(t_len - 1, s_len - 1) = lp(t_len - 1, fb.extended[s_len - 1]);
  if (s_len > 1) {
    fb.beta(t_len - 1, s_len - 2) = lp(t_len - 1, fb.extended[s_len - 2]);
  }
  for (Eigen::Index t = t_len - 2; t >= 0; --t) {
    for (int s = s_len - 1; s >= 0; --s) {
      double acc = fb.beta(t + 1, s);
      if (s + 1 < s_len) acc = LogAdd(acc, fb.beta(t + 1, s + 1));
      if (s + 2 < s_len && allow_skip(s + 2)) {
        acc = LogAdd(acc, fb.beta(t + 1, s + 2));
      }
      fb.beta(t, s) = acc == kNegInf ? kNegInf : acc + lp(t, fb.extended[s]);
    }
  }
  return fb;
}

}  // namespace

double CtcLossValue(const Mat& log_probs, const std::vector<int>& target,
                    int blank) {
  if (log_probs.rows() == 0) {
    return target.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  }
  const auto fb = RunForwardBackward(log_probs, target, blank);
  return -fb.log_z;
}

Tensor CtcLoss(const Tensor& log_probs, const std::vector<int>& target,
               int blank, int input_length) {
  nn::Graph* graph = nn::detail::TensorAccess::graph(log_probs);
  const Eigen::Index full_t = log_probs.rows();
  const Eigen::Index t_len =
      input_length < 0 ? full_t : std::min<Eigen::Index>(input_length, full_t);
  for (const int c : target) {
    if (c < 0 || c >= log_probs.cols() || c == blank) {
      throw DataError("InvalidId", "CTC target symbol out of range");
    }
  }
  if (t_len < 1) {
    throw DataError("TooShort", "CTC needs at least one frame");
  }

  const Mat lp = log_probs.value().topRows(t_len);
  const auto fb = RunForwardBackward(lp, target, blank);

  if (fb.log_z == kNegInf) {
    std::clog << "ctc: infeasible target of length " << target.size()
              << " for " << t_len << " frames\n";
    Mat inf_val(1, 1);
    inf_val(0, 0) = std::numeric_limits<double>::infinity();
    return graph->Make(std::move(inf_val), {log_probs}, nullptr);
  }

  Mat value(1, 1);
  value(0, 0) = -fb.log_z;
  return graph->Make(
      std::move(value), {log_probs},
      [fb, lp, t_len](nn::detail::Node* self,
                      const std::vector<nn::detail::Node*>& p) {
        if (!p[0]->requires_grad) return;
        Mat g = Mat::Zero(p[0]->value.rows(), p[0]->value.cols());
        const int s_len = static_cast<int>(fb.extended.size());
        for (Eigen::Index t = 0; t < t_len; ++t) {
          // Accumulate the posterior mass per symbol in log space, then
          // convert: dL/dlp(t,k) = -sum_{s: label(s)=k} gamma_t(s).
          std::map<int, double> per_symbol;
          for (int s = 0; s < s_len; ++s) {
            const double a = fb.alpha(t, s);
            const double b = fb.beta(t, s);
            if (a == kNegInf || b == kNegInf) continue;
            const double log_gamma =
                a + b - lp(t, fb.extended[s]) - fb.log_z;
            auto [it, inserted] =
                per_symbol.try_emplace(fb.extended[s], log_gamma);
            if (!inserted) it->second = LogAdd(it->second, log_gamma);
          }
          for (const auto& [symbol, log_gamma] : per_symbol) {
            g(t, symbol) = -std::exp(log_gamma);
          }
        }
        p[0]->AccumulateGrad(g * self->grad(0, 0));
      });
}

Hypothesis CtcGreedyDecode(const Mat& log_probs, int blank) {
  Hypothesis hyp;
  int prev = -1;
  double acoustic = 0.0;
  for (Eigen::Index t = 0; t < log_probs.rows(); ++t) {
    int best;
    log_probs.row(t).maxCoeff(&best);
    acoustic += log_probs(t, best);
    if (best != blank && best != prev) hyp.ids.push_back(best);
    prev = best;
  }
  hyp.acoustic = acoustic;  // best-path score
  hyp.score = acoustic;
  return hyp;
}

namespace {

struct BeamEntry {
  double p_blank = kNegInf;     // log prob of this prefix ending in blank
  double p_nonblank = kNegInf;  // ...ending with its last symbol
  double lm = 0.0;              // accumulated LM log-prob of the prefix

  double Acoustic() const { return LogAdd(p_blank, p_nonblank); }
};

}  // namespace

Hypothesis CtcBeamSearch(const Mat& log_probs, int blank,
                         const BeamConfig& config, const CharLM* lm) {
  if (config.width < 1) throw UsageError("beam width must be >= 1");
  if (lm != nullptr && lm->config().vocab_size != log_probs.cols()) {
    throw DataError("VocabMismatch",
                    "LM vocabulary (" +
                        std::to_string(lm->config().vocab_size) +
                        ") differs from acoustic vocabulary (" +
                        std::to_string(log_probs.cols()) + ")");
  }
  const Eigen::Index vocab = log_probs.cols();

  std::map<std::vector<int>, BeamEntry> beams;
  BeamEntry root;
  root.p_blank = 0.0;
  beams[{}] = root;

  // LM next-symbol distributions, fetched once per surviving prefix.
  std::map<std::vector<int>, Eigen::VectorXd> lm_cache;
  auto lm_next = [&](const std::vector<int>& prefix) -> const Eigen::VectorXd& {
    auto it = lm_cache.find(prefix);
    if (it == lm_cache.end()) {
      it = lm_cache.emplace(prefix, lm->NextLogProbs(prefix)).first;
    }
    return it->second;
  };

  auto ranking_score = [&](const std::vector<int>& ids, const BeamEntry& e) {
    double s = e.Acoustic() + config.length_bonus * static_cast<double>(ids.size());
    if (lm != nullptr) s += config.lm_weight * e.lm;
    return s;
  };

  for (Eigen::Index t = 0; t < log_probs.rows(); ++t) {
    std::map<std::vector<int>, BeamEntry> next;
    for (const auto& [prefix, entry] : beams) {
      const double total = entry.Acoustic();
      // Stay on the same prefix via blank.
      {
        BeamEntry& out = next[prefix];
        out.lm = entry.lm;
        out.p_blank = LogAdd(out.p_blank, total + log_probs(t, blank));
      }
      for (int c = 0; c < vocab; ++c) {
        if (c == blank) continue;
        const double lp_c = log_probs(t, c);
        if (!prefix.empty() && prefix.back() == c) {
          // Repeating the last symbol without a blank collapses.
          BeamEntry& same = next[prefix];
          same.lm = entry.lm;
          same.p_nonblank = LogAdd(same.p_nonblank, entry.p_nonblank + lp_c);
          // Extending after a blank emits a genuine new symbol.
          if (entry.p_blank != kNegInf) {
            std::vector<int> grown = prefix;
            grown.push_back(c);
            BeamEntry& out = next[grown];
            if (out.p_blank == kNegInf && out.p_nonblank == kNegInf) {
              out.lm = entry.lm +
                       (lm != nullptr ? lm_next(prefix)[c] : 0.0);
            }
            out.p_nonblank = LogAdd(out.p_nonblank, entry.p_blank + lp_c);
          }
        } else {
          std::vector<int> grown = prefix;
          grown.push_back(c);
          BeamEntry& out = next[grown];
          if (out.p_blank == kNegInf && out.p_nonblank == kNegInf) {
            out.lm = entry.lm + (lm != nullptr ? lm_next(prefix)[c] : 0.0);
          }
          out.p_nonblank = LogAdd(out.p_nonblank, total + lp_c);
        }
      }
    }

    // Prune to the beam width.
    std::vector<std::pair<std::vector<int>, BeamEntry>> ranked(next.begin(),
                                                               next.end());
    std::sort(ranked.begin(), ranked.end(),
              [&](const auto& a, const auto& b) {
                const double sa = ranking_score(a.first, a.second);
                const double sb = ranking_score(b.first, b.second);
                if (sa != sb) return sa > sb;
                return a.first < b.first;  // deterministic tie-break
              });
    if (static_cast<int>(ranked.size()) > config.width) {
      ranked.resize(config.width);
    }
    beams.clear();
    for (auto& [prefix, entry] : ranked) beams.emplace(std::move(prefix), entry);
  }

  Hypothesis best;
  double best_score = kNegInf;
  for (const auto& [prefix, entry] : beams) {
    double lm_total = entry.lm;
    if (lm != nullptr) {
      // Complete the LM probability with the end-of-sequence symbol.
      lm_total += lm_next(prefix)[text::Tokenizer::kEos];
    }
    double s = entry.Acoustic() +
               config.length_bonus * static_cast<double>(prefix.size());
    if (lm != nullptr) s += config.lm_weight * lm_total;
    if (s > best_score || (s == best_score && prefix < best.ids)) {
      best_score = s;
      best.ids = prefix;
      best.acoustic = entry.Acoustic();
      best.lm = lm != nullptr ? lm_total : 0.0;
      best.score = s;
    }
  }
  return best;
}

}  // namespace sawt::task
