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
#include <filesystem>
#include <map>

#include "sawt/audio/vocoder.h"
#include "sawt/task/ctc.h"
#include "sawt/task/lm.h"
#include "sawt/task/tts.h"
#include "sawt/train/finetune.h"
#include "sawt/util/error.h"
#include "sawt/util/rng.h"
#include "support/gradcheck.h"

using namespace sawt;
using namespace sawt::nn;
using namespace sawt::task;
using sawt::util::Rng;

namespace {

Mat RandomLogProbs(int t, int vocab, Rng& rng) {
  Mat logits(t, vocab);
  for (int i = 0; i < t; ++i) {
    for (int j = 0; j < vocab; ++j) logits(i, j) = rng.uniform(-2, 2);
    const double m = logits.row(i).maxCoeff();
    const double lse =
        m + std::log((logits.row(i).array() - m).exp().sum());
    logits.row(i).array() -= lse;
  }
  return logits;
}

// Brute force: sum path probabilities over every alignment that collapses
// to `target`.
std::vector<int> Collapse(const std::vector<int>& path, int blank) {
  std::vector<int> out;
  int prev = -1;
  for (const int s : path) {
    if (s != blank && s != prev) out.push_back(s);
    prev = s;
  }
  return out;
}

double BruteForceCtc(const Mat& lp, const std::vector<int>& target, int blank) {
  const int t_len = static_cast<int>(lp.rows());
  const int vocab = static_cast<int>(lp.cols());
  double total = -std::numeric_limits<double>::infinity();
  std::vector<int> path(t_len, 0);
  const long n_paths = static_cast<long>(std::pow(vocab, t_len));
  for (long code = 0; code < n_paths; ++code) {
    long c = code;
    double logp = 0.0;
    for (int i = 0; i < t_len; ++i) {
      path[i] = static_cast<int>(c % vocab);
      c /= vocab;
      logp += lp(i, path[i]);
    }
    if (Collapse(path, blank) != target) continue;
    total = total == -std::numeric_limits<double>::infinity()
                ? logp
                : std::max(total, logp) +
                      std::log1p(std::exp(-std::abs(total - logp)));
  }
  return -total;
}

// Brute-force best collapsed output by total probability.
std::pair<std::vector<int>, double> BruteForceBestOutput(const Mat& lp,
                                                         int blank) {
  const int t_len = static_cast<int>(lp.rows());
  const int vocab = static_cast<int>(lp.cols());
  std::map<std::vector<int>, double> totals;
  std::vector<int> path(t_len, 0);
  const long n_paths = static_cast<long>(std::pow(vocab, t_len));
  for (long code = 0; code < n_paths; ++code) {
    long c = code;
    double logp = 0.0;
    for (int i = 0; i < t_len; ++i) {
      path[i] = static_cast<int>(c % vocab);
      c /= vocab;
      logp += lp(i, path[i]);
    }
    const auto out = Collapse(path, blank);
    auto [it, inserted] = totals.try_emplace(out, logp);
    if (!inserted) {
      it->second = std::max(it->second, logp) +
                   std::log1p(std::exp(-std::abs(it->second - logp)));
    }
  }
  std::pair<std::vector<int>, double> best{{}, -1e300};
  for (const auto& [out, logp] : totals) {
    if (logp > best.second) best = {out, logp};
  }
  return best;
}

}  // namespace

TEST_CASE("ctc forced alignment with one-hot probabilities is near zero") {
  const int blank = 0;
  Mat lp = Mat::Constant(3, 3, -50.0);
  lp(0, 1) = 0.0;
  lp(1, 2) = 0.0;
  lp(2, 1) = 0.0;
  CHECK(CtcLossValue(lp, {1, 2, 1}, blank) < 1e-9);
}

TEST_CASE("ctc equals brute-force alignment enumeration on random instances") {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const int vocab = rng.uniform_int(2, 3);  // includes blank
    const int t_len = rng.uniform_int(1, 4);
    const Mat lp = RandomLogProbs(t_len, vocab, rng);
    const int max_target = rng.uniform_int(0, 2);
    std::vector<int> target;
    for (int i = 0; i < max_target; ++i) target.push_back(rng.uniform_int(1, vocab - 1));
    const double fast = CtcLossValue(lp, target, 0);
    const double slow = BruteForceCtc(lp, target, 0);
    if (std::isinf(slow)) {
      CHECK(std::isinf(fast));
    } else {
      CHECK(fast == doctest::Approx(slow).epsilon(1e-9));
    }
  }
}

TEST_CASE("ctc infeasible target returns infinity") {
  Rng rng(5);
  const Mat lp = RandomLogProbs(2, 3, rng);
  // Length-3 target cannot fit in 2 frames.
  CHECK(std::isinf(CtcLossValue(lp, {1, 2, 1}, 0)));
  // Repeated symbol needs a separating blank: "aa" needs 3 frames.
  const Mat lp2 = RandomLogProbs(2, 2, rng);
  CHECK(std::isinf(CtcLossValue(lp2, {1, 1}, 0)));
}

TEST_CASE("ctc gradient matches finite differences") {
  Rng rng(7);
  Parameter logits("logits", Mat::Zero(5, 4));
  for (Eigen::Index i = 0; i < 5; ++i)
    for (Eigen::Index j = 0; j < 4; ++j) logits.value(i, j) = rng.uniform(-1, 1);
  const std::vector<int> target = {1, 3, 2};
  const auto report = sawt::testing::GradCheck(
      [&](Graph& g) {
        return CtcLoss(LogSoftmaxRows(g.Param(logits)), target, 0);
      },
      {&logits}, /*max_entries_per_param=*/0);
  CHECK(report.entries_checked == 20);
  CHECK(report.max_rel_err < 1e-6);
}

TEST_CASE("greedy decode collapses repeats and drops blanks") {
  const int blank = 0, a = 1, b = 2;
  Mat lp = Mat::Constant(5, 3, -10.0);
  lp(0, blank) = -0.1;
  lp(1, a) = -0.1;
  lp(2, a) = -0.1;
  lp(3, blank) = -0.1;
  lp(4, b) = -0.1;
  const auto hyp = CtcGreedyDecode(lp, blank);
  CHECK(hyp.ids == std::vector<int>{a, b});
}

TEST_CASE("beam width 1 with no LM equals greedy on unambiguous input") {
  Rng rng(11);
  Mat lp = RandomLogProbs(6, 4, rng);
  // Make every frame strongly peaked so the greedy path dominates.
  for (int t = 0; t < 6; ++t) {
    int best;
    lp.row(t).maxCoeff(&best);
    lp.row(t).array() -= 8.0;
    lp(t, best) = std::log1p(-1e-6);
  }
  BeamConfig cfg;
  cfg.width = 1;
  const auto beam = CtcBeamSearch(lp, 0, cfg, nullptr);
  const auto greedy = CtcGreedyDecode(lp, 0);
  CHECK(beam.ids == greedy.ids);
}

TEST_CASE("wide beam matches exhaustive best-prefix search") {
  Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const Mat lp = RandomLogProbs(4, 3, rng);  // blank + 2 symbols, T=4
    BeamConfig cfg;
    cfg.width = 64;  // more than every reachable prefix
    const auto beam = CtcBeamSearch(lp, 0, cfg, nullptr);
    const auto [best_ids, best_logp] = BruteForceBestOutput(lp, 0);
    CHECK(beam.ids == best_ids);
    CHECK(beam.acoustic == doctest::Approx(best_logp).epsilon(1e-9));
  }
}

TEST_CASE("untrained char lm scores uniformly (perplexity = vocab)") {
  CharLmConfig cfg = CharLmConfig::Toy(12);
  CharLM lm(cfg, 3);
  const double ppl = lm.Perplexity({{6, 7, 8}, {9, 10}});
  CHECK(ppl == doctest::Approx(12.0).epsilon(1e-9));
}

TEST_CASE("char lm overfits a repeated character") {
  CharLmConfig cfg = CharLmConfig::Toy(8);
  CharLM lm(cfg, 5);
  const std::vector<std::vector<int>> corpus(4, std::vector<int>(6, 7));
  for (int step = 0; step < 400; ++step) lm.TrainStep(corpus);
  const Eigen::VectorXd lp = lm.NextLogProbs({7, 7});
  CHECK(std::exp(lp[7]) >= 0.99);
}

TEST_CASE("char lm training is deterministic and serializable") {
  namespace fs = std::filesystem;
  auto train_one = [] {
    CharLM lm(CharLmConfig::Toy(9), 11);
    for (int i = 0; i < 20; ++i) lm.TrainStep({{6, 7, 8}, {8, 7}});
    return lm;
  };
  CharLM a = train_one();
  CharLM b = train_one();
  for (std::size_t i = 0; i < a.params().items().size(); ++i) {
    CHECK(a.params().items()[i]->value == b.params().items()[i]->value);
  }
  const auto path = (fs::temp_directory_path() / "sawt_lm_test.bin").string();
  a.Save(path);
  CharLM loaded = CharLM::Load(path);
  CHECK(loaded.NextLogProbs({6}) == a.NextLogProbs({6}));
  std::remove(path.c_str());
}

TEST_CASE("lm steering flips the hypothesis as lambda crosses a threshold") {
  // Acoustics prefer symbol 6; an LM trained on symbol 7 pulls the decision
  // over as the fusion weight grows.
  const int vocab = 8;
  CharLmConfig cfg = CharLmConfig::Toy(vocab);
  CharLM lm(cfg, 17);
  const std::vector<std::vector<int>> corpus(4, std::vector<int>(5, 7));
  for (int i = 0; i < 200; ++i) lm.TrainStep(corpus);

  Mat lp = Mat::Constant(1, vocab, -30.0);
  lp(0, text::Tokenizer::kBlank) = std::log(0.20);
  lp(0, 6) = std::log(0.45);
  lp(0, 7) = std::log(0.35);

  BeamConfig beam;
  beam.width = 8;

  beam.lm_weight = 0.0;
  const auto no_lm = CtcBeamSearch(lp, text::Tokenizer::kBlank, beam, &lm);
  REQUIRE(no_lm.ids == std::vector<int>{6});

  bool switched = false;
  double switch_lambda = -1.0;
  for (double lambda = 0.0; lambda <= 4.0; lambda += 0.05) {
    beam.lm_weight = lambda;
    const auto hyp = CtcBeamSearch(lp, text::Tokenizer::kBlank, beam, &lm);
    if (hyp.ids == std::vector<int>{7}) {
      switched = true;
      switch_lambda = lambda;
      break;
    }
  }
  CHECK(switched);
  CHECK(switch_lambda > 0.0);

  // Past the switch the decision stays with the LM-preferred symbol.
  beam.lm_weight = 4.0;
  CHECK(CtcBeamSearch(lp, text::Tokenizer::kBlank, beam, &lm).ids ==
        std::vector<int>{7});
}

TEST_CASE("beam scores decompose as acoustic + lambda * lm") {
  const int vocab = 8;
  CharLM lm(CharLmConfig::Toy(vocab), 19);
  Rng rng(21);
  const Mat lp = RandomLogProbs(3, vocab, rng);
  BeamConfig cfg;
  cfg.width = 4;
  cfg.lm_weight = 0.7;
  cfg.length_bonus = 0.1;
  const auto hyp = CtcBeamSearch(lp, text::Tokenizer::kBlank, cfg, &lm);
  CHECK(hyp.score == doctest::Approx(hyp.acoustic + 0.7 * hyp.lm +
                                     0.1 * hyp.ids.size())
                         .epsilon(1e-12));
}

TEST_CASE("lm attached with lambda zero decodes identically to no lm") {
  const int vocab = 9;
  CharLM lm(CharLmConfig::Toy(vocab), 23);
  for (int i = 0; i < 30; ++i) lm.TrainStep({{6, 7}, {8}});
  Rng rng(25);
  for (int trial = 0; trial < 5; ++trial) {
    const Mat lp = RandomLogProbs(5, vocab, rng);
    BeamConfig cfg;
    cfg.width = 6;
    cfg.lm_weight = 0.0;
    const auto with_lm = CtcBeamSearch(lp, text::Tokenizer::kBlank, cfg, &lm);
    const auto without = CtcBeamSearch(lp, text::Tokenizer::kBlank, cfg, nullptr);
    CHECK(with_lm.ids == without.ids);
    CHECK(with_lm.acoustic == without.acoustic);
  }
}

TEST_CASE("beam rejects vocabulary mismatches") {
  CharLM lm(CharLmConfig::Toy(5), 27);
  Rng rng(29);
  const Mat lp = RandomLogProbs(2, 8, rng);
  CHECK_THROWS_AS(CtcBeamSearch(lp, 0, BeamConfig{}, &lm), sawt::Error);
}

TEST_CASE("synthesis respects the stop threshold contract") {
  model::ModelConfig cfg;
  cfg.d_model = 16;
  cfg.n_heads = 2;
  cfg.enc_layers = 1;
  cfg.dec_layers = 1;
  cfg.ffn_dim = 32;
  cfg.vocab_size = 10;
  cfg.mel_bins = 8;
  cfg.conv_channels = 4;
  cfg.codebook_entries = 4;
  cfg.dec_prenet_hidden = 8;
  cfg.postnet_channels = 8;
  cfg.postnet_layers = 2;
  model::SpeechTextModel model(cfg, 31);

  // Threshold 0: sigmoid is always positive, so generation stops at frame 1.
  const auto one = Synthesize(model, {6, 7}, 50, 0.0);
  CHECK(one.frames == 1);
  CHECK_FALSE(one.max_frames_reached);

  // Threshold 1: sigmoid never exceeds 1, so the cap is reached.
  const auto capped = Synthesize(model, {6, 7}, 12, 1.0);
  CHECK(capped.frames == 12);
  CHECK(capped.max_frames_reached);
  CHECK(capped.mel.rows() == 12);
  CHECK(capped.mel.cols() == cfg.mel_bins);

  // Determinism: same text twice gives bit-identical mels.
  const auto again = Synthesize(model, {6, 7}, 12, 1.0);
  CHECK(again.mel == capped.mel);
}

TEST_CASE("dialect classifier posterior sums to one and is uniform for zero logits") {
  model::ModelConfig cfg;
  cfg.d_model = 16;
  cfg.n_heads = 2;
  cfg.enc_layers = 1;
  cfg.dec_layers = 1;
  cfg.ffn_dim = 32;
  cfg.vocab_size = 12;
  cfg.conv_channels = 4;
  cfg.codebook_entries = 4;
  cfg.dec_prenet_hidden = 8;
  cfg.postnet_channels = 8;
  cfg.postnet_layers = 1;
  model::SpeechTextModel model(cfg, 37);

  train::FinetuneConfig fc;
  train::DidFinetuner did(model, fc, {{"d0", 9}, {"d1", 10}, {"d2", 11}});

  Rng rng(39);
  Eigen::VectorXd wave(1600);
  for (int i = 0; i < 1600; ++i) wave[i] = rng.uniform(-0.3, 0.3);

  auto pred = did.Classify(wave);
  CHECK(pred.posterior.sum() == doctest::Approx(1.0).epsilon(1e-6));

  // Zeroed text head -> all logits equal -> uniform posterior.
  model.params().Find("text_postnet.out.w")->value.setZero();
  model.params().Find("text_postnet.out.b")->value.setZero();
  pred = did.Classify(wave);
  for (int k = 0; k < 3; ++k) {
    CHECK(pred.posterior[k] == doctest::Approx(1.0 / 3).epsilon(1e-9));
  }
}

TEST_CASE("griffin-lim vocoder reconstructs a tone-like waveform") {
  audio::MelConfig mel_cfg;
  audio::Waveform tone;
  tone.samples.resize(4000);
  for (int i = 0; i < 4000; ++i) {
    tone.samples[i] = 0.4 * std::sin(2.0 * M_PI * 1000.0 * i / 16000.0);
  }
  const auto mel = audio::LogMel(tone, mel_cfg);
  audio::GriffinLimVocoder vocoder(mel_cfg, 16);
  const auto wave = vocoder.Vocode(mel);
  REQUIRE(!wave.samples.empty());
  double energy = 0.0;
  bool finite = true;
  for (const double s : wave.samples) {
    energy += s * s;
    finite = finite && std::isfinite(s);
  }
  CHECK(finite);
  CHECK(energy > 0.1);
  // The reconstruction keeps the dominant frequency: check via a coarse DFT.
  const int n = 2048;
  double best_mag = -1.0;
  int best_bin = 0;
  for (int k = 1; k < 200; ++k) {
    double re = 0, im = 0;
    for (int i = 0; i < n; ++i) {
      const double ang = -2.0 * M_PI * k * i / n;
      re += wave.samples[i] * std::cos(ang);
      im += wave.samples[i] * std::sin(ang);
    }
    const double mag = re * re + im * im;
    if (mag > best_mag) {
      best_mag = mag;
      best_bin = k;
    }
  }
  const double freq = best_bin * 16000.0 / n;
  CHECK(freq == doctest::Approx(1000.0).epsilon(0.08));
}
