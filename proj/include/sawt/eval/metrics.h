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

#ifndef SAWT_EVAL_METRICS_H_
#define SAWT_EVAL_METRICS_H_

#include <string>
#include <vector>

namespace sawt::eval {

struct EditCounts {
  long distance = 0;
  long substitutions = 0;
  long insertions = 0;
  long deletions = 0;
};

// Minimal unit-cost edit distance from ref to hyp with one achieving
// substitution/insertion/deletion decomposition. Insertions are hypothesis
// tokens without a reference token; deletions the reverse.
template <typename Token>
EditCounts EditDistance(const std::vector<Token>& ref,
                        const std::vector<Token>& hyp);

struct ScoreReport {
  double wer = 0.0;
  double cer = 0.0;
  long word_substitutions = 0, word_insertions = 0, word_deletions = 0;
  long char_substitutions = 0, char_insertions = 0, char_deletions = 0;
  long n_ref_words = 0;
  long n_ref_chars = 0;
  long n_utterances = 0;

  std::string ToJson() const;
  // Percentage table in the WER/CER reporting style.
  std::string ToTable() const;
};

struct ScoreOptions {
  // Normalize both sides before scoring (recommended); --raw turns it off.
  bool normalize = true;
  // Include spaces in the character stream for CER.
  bool chars_include_space = true;
};

// Corpus-level scores: total edits / total reference tokens, pooled over
// all pairs. refs and hyps must align index by index (CountMismatch).
ScoreReport Score(const std::vector<std::string>& refs,
                  const std::vector<std::string>& hyps,
                  const ScoreOptions& options = {});

// Exact-match fraction over aligned label lists.
double Accuracy(const std::vector<std::string>& refs,
                const std::vector<std::string>& hyps);

std::vector<std::string> SplitWords(const std::string& text);

}  // namespace sawt::eval

#endif  // SAWT_EVAL_METRICS_H_
