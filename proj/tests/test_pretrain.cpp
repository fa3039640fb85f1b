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

#include "sawt/train/pretrain.h"
#include "sawt/util/error.h"
#include "support/gradcheck.h"
#include "support/toy_fixture.h"

using namespace sawt;
using namespace sawt::nn;
using namespace sawt::train;
using sawt::testing::GradCheck;
using sawt::testing::MakeToyFixture;
using sawt::util::Rng;

namespace {

data::Batch BatchOf(const testing::ToyFixture& f, std::vector<int> indices,
                    data::Modality modality) {
  std::vector<const data::Utterance*> utts;
  for (const int i : indices) utts.push_back(&f.utterances[i]);
  return data::CollateBatch(utts, f.tokenizer, modality);
}

}  // namespace

TEST_CASE("speech mlm loss is ln K for uniform logits") {
  Graph g;
  const int k = 4;
  const Tensor logits = g.Constant(Mat::Zero(6, k));
  audio::MaskSpec mask;
  mask.total_frames = 6;
  mask.spans = {{1, 3}};
  const std::vector<int> labels = {0, 1, 2, 3, 0, 1};
  int count = 0;
  const Tensor loss = SpeechMlmLoss(logits, labels, mask, &count);
  CHECK(count == 3);
  CHECK(loss.scalar() == doctest::Approx(std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("speech mlm loss with empty mask is zero") {
  Graph g;
  const Tensor logits = g.Constant(Mat::Zero(5, 3));
  audio::MaskSpec mask;
  mask.total_frames = 5;
  int count = -1;
  const Tensor loss = SpeechMlmLoss(logits, {0, 1, 2, 0, 1}, mask, &count);
  CHECK(count == 0);
  CHECK(loss.scalar() == 0.0);
}

TEST_CASE("speech mlm loss matches hand-computed cross-entropy") {
  Graph g;
  Mat logits = Mat::Zero(4, 2);
  logits.row(1) << 2.0, 0.0;
  logits.row(2) << 0.0, 1.0;
  logits.row(3) << -1.0, 3.0;
  audio::MaskSpec mask;
  mask.total_frames = 4;
  mask.spans = {{1, 3}};
  const std::vector<int> labels = {0, 0, 1, 1};
  // Hand arithmetic: CE per row = log(sum exp) - logit[target].
  const double ce1 = std::log(std::exp(2.0) + 1.0) - 2.0;
  const double ce2 = std::log(1.0 + std::exp(1.0)) - 1.0;
  const double ce3 = std::log(std::exp(-1.0) + std::exp(3.0)) - 3.0;
  const double expected = (ce1 + ce2 + ce3) / 3.0;
  const Tensor loss = SpeechMlmLoss(g.Constant(logits), labels, mask);
  CHECK(loss.scalar() == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("speech mlm gradient is zero on unmasked logits") {
  Parameter logits("logits", Mat::Zero(6, 3));
  Rng rng(5);
  for (Eigen::Index i = 0; i < 6; ++i)
    for (Eigen::Index j = 0; j < 3; ++j) logits.value(i, j) = rng.uniform(-1, 1);
  logits.ZeroGrad();
  audio::MaskSpec mask;
  mask.total_frames = 6;
  mask.spans = {{2, 2}};  // frames 2 and 3
  Graph g;
  const Tensor loss =
      SpeechMlmLoss(g.Param(logits), {0, 1, 2, 0, 1, 2}, mask);
  g.Backward(loss);
  for (const int t : {0, 1, 4, 5}) {
    CHECK(logits.grad.row(t).cwiseAbs().maxCoeff() == 0.0);
  }
  for (const int t : {2, 3}) {
    CHECK(logits.grad.row(t).cwiseAbs().maxCoeff() > 0.0);
  }
}

TEST_CASE("mel reconstruction loss: zero for exact match, |delta| for offset") {
  Graph g;
  Rng rng(7);
  Mat target(5, 4);
  for (Eigen::Index i = 0; i < 5; ++i)
    for (Eigen::Index j = 0; j < 4; ++j) target(i, j) = rng.uniform(-2, 2);

  model::SpeechTextModel::SpeechPostnetOut out;
  out.mel_before = g.Constant(target);
  out.mel_after = g.Constant(target);
  out.stop_logits = g.Constant(Mat::Zero(5, 1));
  const auto parts = MelReconLoss(out, target, 5, 5.0);
  CHECK(parts.l1_before.scalar() == 0.0);
  CHECK(parts.l1_after.scalar() == 0.0);

  const double delta = 0.37;
  out.mel_before = g.Constant(target.array() + delta);
  const auto shifted = MelReconLoss(out, target, 5, 5.0);
  CHECK(shifted.l1_before.scalar() == doctest::Approx(delta).epsilon(1e-12));
}

TEST_CASE("mel reconstruction ignores frames beyond the valid range") {
  Graph g;
  Rng rng(8);
  Mat target(6, 3);
  for (Eigen::Index i = 0; i < 6; ++i)
    for (Eigen::Index j = 0; j < 3; ++j) target(i, j) = rng.uniform(-1, 1);
  Mat output = target;
  output.row(5).setConstant(99.0);  // padding garbage
  Mat target_padded = target;
  target_padded.row(5).setConstant(-99.0);

  model::SpeechTextModel::SpeechPostnetOut out;
  out.mel_before = g.Constant(output);
  out.mel_after = g.Constant(output);
  out.stop_logits = g.Constant(Mat::Zero(6, 1));
  const auto parts = MelReconLoss(out, target_padded, 5, 5.0);
  CHECK(parts.l1_before.scalar() == 0.0);
  CHECK(parts.l1_after.scalar() == 0.0);
}

TEST_CASE("stop BCE is near zero for confident correct stop logits") {
  Graph g;
  Mat target = Mat::Zero(4, 2);
  Mat stop(4, 1);
  stop << -20.0, -20.0, -20.0, 20.0;  // confident: stop only at the end
  model::SpeechTextModel::SpeechPostnetOut out;
  out.mel_before = g.Constant(target);
  out.mel_after = g.Constant(target);
  out.stop_logits = g.Constant(stop);
  const auto parts = MelReconLoss(out, target, 4, 5.0);
  CHECK(parts.stop_bce.scalar() < 1e-6);
}

TEST_CASE("text corruption endpoints and statistics") {
  std::vector<int> ids(100, 7);
  Rng rng(11);
  const auto none = CorruptText(ids, 0.0, 3.0, rng);
  CHECK(none.corrupted == ids);
  CHECK(none.masked == 0);

  const auto all = CorruptText(ids, 1.0, 3.0, rng);
  CHECK(all.masked == 100);
  for (const int id : all.corrupted) CHECK(id == text::Tokenizer::kMask);

  // Monte-Carlo: the mean masked fraction tracks the rate.
  double total_fraction = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const auto c = CorruptText(ids, 0.3, 3.0, rng);
    total_fraction += c.masked / 100.0;
  }
  CHECK(total_fraction / draws == doctest::Approx(0.30).epsilon(0.01));
}

TEST_CASE("text corruption is deterministic per seed") {
  std::vector<int> ids(50, 9);
  Rng a(77), b(77);
  CHECK(CorruptText(ids, 0.4, 3.0, a).corrupted ==
        CorruptText(ids, 0.4, 3.0, b).corrupted);
}

TEST_CASE("text dae loss endpoints") {
  Graph g;
  const int vocab = 10;
  const std::vector<int> targets = {3, 5};
  CHECK(TextDaeLoss(g.Constant(Mat::Zero(2, vocab)), targets).scalar() ==
        doctest::Approx(std::log(10.0)).epsilon(1e-12));

  Mat confident = Mat::Zero(2, vocab);
  confident(0, 3) = 50.0;
  confident(1, 5) = 50.0;
  CHECK(TextDaeLoss(g.Constant(confident), targets).scalar() < 1e-9);

  Mat two(2, 2);
  two << 1.0, -1.0, 0.5, 0.5;
  const double ce0 = std::log(std::exp(1.0) + std::exp(-1.0)) - 1.0;
  const double ce1 = std::log(std::exp(0.5) + std::exp(0.5)) - 0.5;
  CHECK(TextDaeLoss(g.Constant(two), {0, 1}).scalar() ==
        doctest::Approx((ce0 + ce1) / 2).epsilon(1e-12));

  CHECK_THROWS_AS(TextDaeLoss(g.Constant(Mat::Zero(3, vocab)), targets),
                  sawt::Error);
}

TEST_CASE("mix endpoints: identity at 0, codebook image at 1") {
  model::ModelConfig cfg;
  cfg.d_model = 8;
  cfg.n_heads = 2;
  cfg.vocab_size = 10;
  cfg.conv_channels = 4;
  cfg.codebook_groups = 2;
  cfg.codebook_entries = 5;
  model::SpeechTextModel model(cfg, 3);
  Graph g;
  Ctx ctx{g};
  Rng rng(13);
  Mat states(40, 8);
  for (Eigen::Index i = 0; i < 40; ++i)
    for (Eigen::Index j = 0; j < 8; ++j) states(i, j) = rng.uniform(-1, 1);
  const Tensor ts = g.Constant(states);

  Rng mix_rng(1);
  const auto zero = MixQuantized(ctx, model, ts, 0.0, 1.0, mix_rng);
  CHECK(zero.replaced == 0);
  CHECK(zero.mixed.value() == states);  // bit-exact identity

  const auto one = MixQuantized(ctx, model, ts, 1.0, 1.0, mix_rng);
  CHECK(one.replaced == 40);
  const auto quant = model.Quantize(ctx, ts);
  CHECK((one.mixed.value() - quant.quantized.value()).cwiseAbs().maxCoeff() ==
        0.0);
}

TEST_CASE("mix replacement rate tracks mix_prob") {
  model::ModelConfig cfg;
  cfg.d_model = 4;
  cfg.n_heads = 1;
  cfg.vocab_size = 8;
  cfg.codebook_groups = 1;
  cfg.codebook_entries = 3;
  model::SpeechTextModel model(cfg, 5);
  Graph g;
  Ctx ctx{g};
  Rng rng(17);
  Mat states = Mat::Zero(100, 4);
  const Tensor ts = g.Constant(states);
  Rng mix_rng(23);
  long replaced = 0, total = 0;
  for (int i = 0; i < 100; ++i) {
    const auto mix = MixQuantized(ctx, model, ts, 0.1, 1.0, mix_rng);
    replaced += mix.replaced;
    total += mix.total;
  }
  CHECK(static_cast<double>(replaced) / total ==
        doctest::Approx(0.10).epsilon(0.1));
}

TEST_CASE("diversity loss endpoints") {
  Graph g;
  const int v = 100;
  CHECK(std::abs(DiversityLoss(g.Constant(Mat::Constant(2, v, 1.0 / v))).scalar()) <
        1e-12);

  Mat onehot = Mat::Zero(2, v);
  onehot(0, 3) = 1.0;
  onehot(1, 7) = 1.0;
  CHECK(DiversityLoss(g.Constant(onehot)).scalar() ==
        doctest::Approx((v - 1.0) / v).epsilon(1e-12));

  Mat half = Mat::Zero(1, 4);
  half(0, 0) = 0.5;
  half(0, 1) = 0.5;
  CHECK(DiversityLoss(g.Constant(half)).scalar() ==
        doctest::Approx(0.5).epsilon(1e-12));

  Mat bad = Mat::Constant(1, 4, 0.3);
  CHECK_THROWS_AS(DiversityLoss(g.Constant(bad)), sawt::Error);
}

TEST_CASE("diversity loss stays within [0, (V-1)/V] on random distributions") {
  Graph g;
  Rng rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    const int v = rng.uniform_int(2, 12);
    Mat p(2, v);
    for (int gi = 0; gi < 2; ++gi) {
      double sum = 0;
      for (int j = 0; j < v; ++j) {
        p(gi, j) = rng.uniform(0.0, 1.0) + 1e-9;
        sum += p(gi, j);
      }
      p.row(gi) /= sum;
    }
    const double d = DiversityLoss(g.Constant(p)).scalar();
    CHECK(d >= -1e-12);
    CHECK(d <= (v - 1.0) / v + 1e-12);
  }
}

TEST_CASE("pretrain step: losses are additive and runs are deterministic") {
  auto fixture = MakeToyFixture("pretrain_add", 101, 4, 0, 4);
  const data::Batch speech = BatchOf(fixture, {0, 1}, data::Modality::kSpeech);
  const data::Batch text = BatchOf(fixture, {2, 3}, data::Modality::kText);

  TrainConfig tc = TrainConfig::Toy();
  tc.seed = 5;
  tc.w_mlm = 0.7;
  tc.w_sdae = 1.3;
  tc.w_tdae = 0.9;
  tc.w_div = 0.4;

  auto run_once = [&]() {
    model::SpeechTextModel model(fixture.model_config, 2026);
    Pretrainer trainer(model, fixture.units, tc);
    return trainer.Step(speech, text);
  };
  const LossReport a = run_once();
  const LossReport b = run_once();

  const double weighted = tc.w_mlm * a.speech_mlm + tc.w_sdae * a.speech_dae +
                          tc.w_tdae * a.text_dae + tc.w_div * a.diversity;
  CHECK(std::abs(a.total - weighted) < 1e-10);

  // Bit-identical rerun.
  CHECK(a.total == b.total);
  CHECK(a.speech_mlm == b.speech_mlm);
  CHECK(a.speech_dae == b.speech_dae);
  CHECK(a.text_dae == b.text_dae);
  CHECK(a.diversity == b.diversity);
  CHECK(a.masked_frames == b.masked_frames);
  CHECK(a.codes_replaced == b.codes_replaced);
}

TEST_CASE("pretrain step with all-zero weights leaves parameters unchanged") {
  auto fixture = MakeToyFixture("pretrain_zero", 103, 3, 0, 4);
  const data::Batch speech = BatchOf(fixture, {0}, data::Modality::kSpeech);
  const data::Batch text = BatchOf(fixture, {1, 2}, data::Modality::kText);

  TrainConfig tc = TrainConfig::Toy();
  tc.w_mlm = tc.w_sdae = tc.w_tdae = tc.w_div = 0.0;
  model::SpeechTextModel model(fixture.model_config, 7);
  std::vector<Mat> before;
  for (const auto& p : model.params().items()) before.push_back(p->value);
  Pretrainer trainer(model, fixture.units, tc);
  const LossReport report = trainer.Step(speech, text);
  CHECK(report.total == 0.0);
  std::size_t i = 0;
  for (const auto& p : model.params().items()) CHECK(p->value == before[i++]);
}

TEST_CASE("finite differences agree for each pretraining loss") {
  // Frozen stochastic choices; tiny d=8 model; a handful of parameter
  // slices spread over the sub-networks each loss exercises.
  auto fixture = MakeToyFixture("pretrain_fd", 107, 2, 0, 4, /*d_model=*/8);
  model::SpeechTextModel model(fixture.model_config, 11);
  const data::Batch speech = BatchOf(fixture, {0}, data::Modality::kSpeech);
  const data::Batch text = BatchOf(fixture, {1}, data::Modality::kText);

  const Eigen::VectorXd wave = speech.waves.row(0).head(speech.wave_lengths[0]);
  audio::Waveform w;
  w.samples.assign(wave.data(), wave.data() + wave.size());
  const auto mel = audio::LogMel(w);
  const auto labels = audio::AssignLabels(fixture.units, mel);
  const int aligned = std::min<int>(model.PrenetFrameCount(wave.size()),
                                    static_cast<int>(labels.size()));
  Rng mask_rng(3);
  const audio::MaskSpec mask =
      audio::SampleMaskSpans(aligned, 10, 0.2, mask_rng);
  REQUIRE(mask.masked_count() > 0);

  auto pick = [&](std::initializer_list<const char*> names) {
    std::vector<Parameter*> out;
    for (const char* n : names) {
      out.push_back(model.params().Find(n));
      REQUIRE(out.back() != nullptr);
    }
    return out;
  };

  // Speech masked-unit prediction.
  {
    const auto report = GradCheck(
        [&](Graph& g) {
          Ctx ctx{g};
          const Tensor enc =
              model.Encoder(ctx, model.SpeechEncoderPrenet(ctx, wave, &mask));
          return SpeechMlmLoss(model.UnitLogits(ctx, enc), labels, mask);
        },
        pick({"speech_prenet.conv0.w", "speech_prenet.mask",
              "encoder.layer0.attn.v.w", "unit_head.out.w",
              "encoder.norm.g"}));
    CHECK(report.entries_checked >= 25);
    CHECK(report.max_rel_err < 1e-4);
  }

  // Speech denoising reconstruction.
  {
    Mat shifted = Mat::Zero(mel.frames.rows(), mel.frames.cols());
    shifted.bottomRows(mel.frames.rows() - 1) =
        mel.frames.topRows(mel.frames.rows() - 1);
    const auto report = GradCheck(
        [&](Graph& g) {
          Ctx ctx{g};
          const Tensor enc =
              model.Encoder(ctx, model.SpeechEncoderPrenet(ctx, wave, &mask));
          const Tensor hidden =
              model.Decoder(ctx, model.SpeechDecoderPrenet(ctx, shifted), enc);
          const auto post = model.SpeechDecoderPostnet(ctx, hidden);
          return SpeechDaeLoss(post, mel.frames,
                               static_cast<int>(mel.frames.rows()), 5.0);
        },
        pick({"speech_dec_prenet.in.w", "decoder.layer0.cross.q.w",
              "speech_postnet.mel.w", "speech_postnet.conv0.w",
              "speech_postnet.stop.w"}));
    CHECK(report.entries_checked >= 25);
    CHECK(report.max_rel_err < 1e-4);
  }

  // Text denoising.
  {
    std::vector<int> ids(text.tokens[0].begin(),
                         text.tokens[0].begin() + text.token_lengths[0]);
    Rng corrupt_rng(9);
    const auto corrupted = CorruptText(ids, 0.4, 3.0, corrupt_rng);
    std::vector<int> dec_in = {text::Tokenizer::kBos};
    dec_in.insert(dec_in.end(), ids.begin(), ids.end() - 1);
    const auto report = GradCheck(
        [&](Graph& g) {
          Ctx ctx{g};
          const Tensor enc = model.Encoder(
              ctx, model.TextEncoderPrenet(ctx, corrupted.corrupted));
          const Tensor hidden =
              model.Decoder(ctx, model.TextDecoderPrenet(ctx, dec_in), enc);
          return TextDaeLoss(model.TextDecoderPostnet(ctx, hidden), ids);
        },
        pick({"text_prenet.embed.w", "decoder.layer0.self.q.w",
              "text_postnet.out.w", "decoder.norm.g",
              "encoder.layer0.ffn.out.w"}));
    CHECK(report.entries_checked >= 25);
    CHECK(report.max_rel_err < 1e-4);
  }

  // Cross-modal diversity through the quantizer.
  {
    std::vector<int> ids(text.tokens[0].begin(),
                         text.tokens[0].begin() + text.token_lengths[0]);
    const auto report = GradCheck(
        [&](Graph& g) {
          Ctx ctx{g};
          const Tensor enc =
              model.Encoder(ctx, model.TextEncoderPrenet(ctx, ids));
          const auto quant = model.Quantize(ctx, enc, 0.8);
          std::vector<Tensor> rows;
          for (const auto& probs : quant.soft_probs) {
            rows.push_back(
                MulScalar(SumOverRows(probs), 1.0 / probs.rows()));
          }
          return DiversityLoss(VConcat(rows));
        },
        pick({"codebook.g0", "codebook.g1", "text_prenet.embed.w",
              "encoder.layer0.attn.q.w", "encoder.norm.b"}));
    CHECK(report.entries_checked >= 25);
    CHECK(report.max_rel_err < 1e-4);
  }
}
