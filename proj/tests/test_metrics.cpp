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

#include <algorithm>
#include <functional>
#include <map>

#include "sawt/eval/metrics.h"
#include "sawt/util/error.h"
#include "sawt/util/rng.h"

using namespace sawt::eval;
using sawt::util::Rng;

namespace {

// Recursive-memo reference edit distance.
long OracleDistance(const std::vector<int>& a, const std::vector<int>& b) {
  std::map<std::pair<std::size_t, std::size_t>, long> memo;
  std::function<long(std::size_t, std::size_t)> go =
      [&](std::size_t i, std::size_t j) -> long {
    if (i == a.size()) return static_cast<long>(b.size() - j);
    if (j == b.size()) return static_cast<long>(a.size() - i);
    const auto key = std::make_pair(i, j);
    if (const auto it = memo.find(key); it != memo.end()) return it->second;
    long best;
    if (a[i] == b[j]) {
      best = go(i + 1, j + 1);
    } else {
      best = 1 + std::min({go(i + 1, j + 1), go(i + 1, j), go(i, j + 1)});
    }
    memo[key] = best;
    return best;
  };
  return go(0, 0);
}

std::vector<int> RandomSeq(Rng& rng, int max_len, int alphabet) {
  std::vector<int> s(rng.uniform_int(0, max_len));
  for (auto& x : s) x = rng.uniform_int(0, alphabet - 1);
  return s;
}

}  // namespace

TEST_CASE("edit distance basics") {
  const std::vector<std::string> abc = {"a", "b", "c"};
  const auto same = EditDistance(abc, abc);
  CHECK(same.distance == 0);
  CHECK(same.substitutions == 0);
  CHECK(same.insertions == 0);
  CHECK(same.deletions == 0);

  const auto sub = EditDistance<char32_t>({U'a', U'b', U'c'}, {U'a', U'x', U'c'});
  CHECK(sub.distance == 1);
  CHECK(sub.substitutions == 1);
  CHECK(sub.insertions == 0);
  CHECK(sub.deletions == 0);

  const auto del = EditDistance<std::string>({"x", "y"}, {});
  CHECK(del.distance == 2);
  CHECK(del.deletions == 2);

  const auto ins = EditDistance<std::string>({}, {"x"});
  CHECK(ins.distance == 1);
  CHECK(ins.insertions == 1);
}

TEST_CASE("edit distance matches a recursive-memo oracle on 200 random pairs") {
  Rng rng(20260113);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = RandomSeq(rng, 10, 4);
    const auto b = RandomSeq(rng, 10, 4);
    const auto fast = EditDistance(a, b);
    CHECK(fast.distance == OracleDistance(a, b));
    // The decomposition must account for the whole distance.
    CHECK(fast.substitutions + fast.insertions + fast.deletions ==
          fast.distance);
    // Token bookkeeping: |ref| - del + ins == |hyp| under any alignment.
    CHECK(static_cast<long>(a.size()) - fast.deletions + fast.insertions ==
          static_cast<long>(b.size()));
  }
}

TEST_CASE("edit distance is a metric on 1000 random triples") {
  Rng rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto a = RandomSeq(rng, 8, 3);
    const auto b = RandomSeq(rng, 8, 3);
    const auto c = RandomSeq(rng, 8, 3);
    const long ab = EditDistance(a, b).distance;
    const long ba = EditDistance(b, a).distance;
    const long ac = EditDistance(a, c).distance;
    const long cb = EditDistance(c, b).distance;
    CHECK(ab == ba);                        // symmetry
    CHECK(EditDistance(a, a).distance == 0);  // identity
    CHECK(ab <= ac + cb);                   // triangle inequality
    if (ab == 0) CHECK(a == b);
  }
}

TEST_CASE("wer: one substitution over two words is 0.5") {
  // ref "kataba alwalad" / hyp "kataba walad" in Arabic script.
  const auto report = Score({"كتب الولد"},
                            {"كتب ولد"});
  CHECK(report.wer == doctest::Approx(0.5));
  CHECK(report.word_substitutions == 1);
  CHECK(report.n_ref_words == 2);
}

TEST_CASE("identical corpora score zero") {
  const auto report = Score({"abc def", "xyz"}, {"abc def", "xyz"});
  CHECK(report.wer == 0.0);
  CHECK(report.cer == 0.0);
}

TEST_CASE("empty hypothesis against a 3-word reference gives wer 1.0") {
  const auto report = Score({"one two three"}, {""});
  CHECK(report.wer == doctest::Approx(1.0));
  CHECK(report.word_deletions == 3);
}

TEST_CASE("scores are invariant under corpus permutation") {
  const std::vector<std::string> refs = {"a b", "c d e", "f"};
  const std::vector<std::string> hyps = {"a x", "c d", "f"};
  const auto fwd = Score(refs, hyps);
  const std::vector<std::string> refs_p = {refs[2], refs[0], refs[1]};
  const std::vector<std::string> hyps_p = {hyps[2], hyps[0], hyps[1]};
  const auto perm = Score(refs_p, hyps_p);
  CHECK(fwd.wer == perm.wer);
  CHECK(fwd.cer == perm.cer);
}

TEST_CASE("corpus pooling differs from per-utterance averaging") {
  // 1 error over 1 word + 0 errors over 9 words: pooled = 1/10.
  const auto report = Score({"a", "b c d e f g h i j"}, {"x", "b c d e f g h i j"});
  CHECK(report.wer == doctest::Approx(0.1));
}

TEST_CASE("normalization chain: diacritized hypothesis scores zero") {
  const std::string bare = "كتب";
  const std::string diacritized = "كَتَبَ";
  const auto normalized = Score({bare}, {diacritized});
  CHECK(normalized.wer == 0.0);
  CHECK(normalized.cer == 0.0);
  ScoreOptions raw;
  raw.normalize = false;
  CHECK(Score({bare}, {diacritized}, raw).cer > 0.0);
}

TEST_CASE("cer space handling flag") {
  ScoreOptions with_space;
  const auto a = Score({"ab cd"}, {"abcd"}, with_space);
  CHECK(a.cer > 0.0);  // missing space counts
  ScoreOptions no_space;
  no_space.chars_include_space = false;
  const auto b = Score({"ab cd"}, {"abcd"}, no_space);
  CHECK(b.cer == 0.0);
}

TEST_CASE("count mismatch raises") {
  CHECK_THROWS_AS(Score({"a"}, {}), sawt::Error);
  CHECK_THROWS_AS(Accuracy({"a"}, {}), sawt::Error);
}

TEST_CASE("accuracy endpoints and random baseline") {
  CHECK(Accuracy({"x", "y"}, {"x", "y"}) == 1.0);
  CHECK(Accuracy({"x", "y"}, {"y", "x"}) == 0.0);

  Rng rng(23);
  const int classes = 17, n = 10000;
  std::vector<std::string> refs(n), hyps(n);
  for (int i = 0; i < n; ++i) {
    refs[i] = std::to_string(rng.uniform_int(classes));
    hyps[i] = std::to_string(rng.uniform_int(classes));
  }
  CHECK(Accuracy(refs, hyps) == doctest::Approx(1.0 / 17).epsilon(0.15));
}

TEST_CASE("report formatting carries percentages") {
  const auto report = Score({"a b c d"}, {"a b x d"});
  const std::string table = report.ToTable();
  CHECK(table.find("WER 25.00%") != std::string::npos);
  CHECK(report.ToJson().find("\"wer\"") != std::string::npos);
}
