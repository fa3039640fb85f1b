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

#ifndef SAWT_TESTS_SUPPORT_GRADCHECK_H_
#define SAWT_TESTS_SUPPORT_GRADCHECK_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "sawt/nn/tensor.h"
#include "sawt/util/rng.h"

namespace sawt::testing {

struct GradCheckReport {
  double max_rel_err = 0.0;
  int entries_checked = 0;
};

// Central finite differences against the analytic gradient of a scalar loss.
// `make_loss` must rebuild the loss on the given graph from the parameters'
// CURRENT values, with all stochastic choices frozen. Checks up to
// `max_entries_per_param` entries per parameter (all entries when the
// parameter is small or max_entries_per_param <= 0).
inline GradCheckReport GradCheck(
    const std::function<nn::Tensor(nn::Graph&)>& make_loss,
    const std::vector<nn::Parameter*>& params, int max_entries_per_param = 5,
    double h = 1e-5, std::uint64_t pick_seed = 1234) {
  for (auto* p : params) p->ZeroGrad();
  {
    nn::Graph g;
    const nn::Tensor loss = make_loss(g);
    g.Backward(loss);
  }

  auto eval = [&]() {
    nn::Graph g;
    return make_loss(g).scalar();
  };

  util::Rng rng(pick_seed);
  GradCheckReport report;
  for (auto* p : params) {
    const Eigen::Index n = p->value.size();
    if (n == 0) continue;
    std::vector<Eigen::Index> picks;
    if (max_entries_per_param <= 0 || n <= max_entries_per_param) {
      for (Eigen::Index i = 0; i < n; ++i) picks.push_back(i);
    } else {
      for (int i = 0; i < max_entries_per_param; ++i) {
        picks.push_back(static_cast<Eigen::Index>(rng.uniform_int(n)));
      }
    }
    for (const Eigen::Index flat : picks) {
      double* w = p->value.data() + flat;
      const double saved = *w;
      *w = saved + h;
      const double f_plus = eval();
      *w = saved - h;
      const double f_minus = eval();
      *w = saved;
      const double numeric = (f_plus - f_minus) / (2.0 * h);
      const double analytic = p->grad(flat);
      const double rel = std::abs(analytic - numeric) /
                         std::max(std::abs(analytic) + std::abs(numeric), 1e-6);
      report.max_rel_err = std::max(report.max_rel_err, rel);
      ++report.entries_checked;
    }
  }
  return report;
}

}  // namespace sawt::testing

#endif  // SAWT_TESTS_SUPPORT_GRADCHECK_H_
