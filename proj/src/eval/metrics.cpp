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

#include "sawt/eval/metrics.h"

#include <cstdio>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "sawt/text/normalize.h"
#include "sawt/util/error.h"
#include "sawt/util/utf8.h"

namespace sawt::eval {

template <typename Token>
EditCounts EditDistance(const std::vector<Token>& ref,
                        const std::vector<Token>& hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  struct Cell {
    long d, s, i, del;
  };
  std::vector<Cell> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    prev[j] = {static_cast<long>(j), 0, static_cast<long>(j), 0};
  }
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = {static_cast<long>(i), 0, 0, static_cast<long>(i)};
    for (std::size_t j = 1; j <= m; ++j) {
      if (ref[i - 1] == hyp[j - 1]) {
        cur[j] = prev[j - 1];
        continue;
      }
      const Cell sub = {prev[j - 1].d + 1, prev[j - 1].s + 1, prev[j - 1].i,
                        prev[j - 1].del};
      const Cell del = {prev[j].d + 1, prev[j].s, prev[j].i, prev[j].del + 1};
      const Cell ins = {cur[j - 1].d + 1, cur[j - 1].s, cur[j - 1].i + 1,
                        cur[j - 1].del};
      // Preference order on ties: substitution, deletion, insertion.
      Cell best = sub;
      if (del.d < best.d) best = del;
      if (ins.d < best.d) best = ins;
      cur[j] = best;
    }
    std::swap(prev, cur);
  }
  return {prev[m].d, prev[m].s, prev[m].i, prev[m].del};
}

template EditCounts EditDistance<std::string>(const std::vector<std::string>&,
                                              const std::vector<std::string>&);
template EditCounts EditDistance<char32_t>(const std::vector<char32_t>&,
                                           const std::vector<char32_t>&);
template EditCounts EditDistance<int>(const std::vector<int>&,
                                      const std::vector<int>&);

std::vector<std::string> SplitWords(const std::string& text) {
  std::vector<std::string> words;
  std::istringstream in(text);
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

ScoreReport Score(const std::vector<std::string>& refs,
                  const std::vector<std::string>& hyps,
                  const ScoreOptions& options) {
  if (refs.size() != hyps.size()) {
    throw DataError("CountMismatch",
                    std::to_string(refs.size()) + " references vs " +
                        std::to_string(hyps.size()) + " hypotheses");
  }
  ScoreReport report;
  report.n_utterances = static_cast<long>(refs.size());
  long word_edits = 0, char_edits = 0;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const std::string ref =
        options.normalize ? text::NormalizeText(refs[i]) : refs[i];
    const std::string hyp =
        options.normalize ? text::NormalizeText(hyps[i]) : hyps[i];

    const auto w = EditDistance(SplitWords(ref), SplitWords(hyp));
    word_edits += w.distance;
    report.word_substitutions += w.substitutions;
    report.word_insertions += w.insertions;
    report.word_deletions += w.deletions;
    report.n_ref_words += static_cast<long>(SplitWords(ref).size());

    auto chars_of = [&](const std::string& s) {
      std::vector<char32_t> cps = util::Utf8Decode(s);
      if (!options.chars_include_space) {
        std::erase(cps, U' ');
      }
      return cps;
    };
    const auto c = EditDistance(chars_of(ref), chars_of(hyp));
    char_edits += c.distance;
    report.char_substitutions += c.substitutions;
    report.char_insertions += c.insertions;
    report.char_deletions += c.deletions;
    report.n_ref_chars += static_cast<long>(chars_of(ref).size());
  }
  report.wer = report.n_ref_words > 0
                   ? static_cast<double>(word_edits) / report.n_ref_words
                   : 0.0;
  report.cer = report.n_ref_chars > 0
                   ? static_cast<double>(char_edits) / report.n_ref_chars
                   : 0.0;
  return report;
}

double Accuracy(const std::vector<std::string>& refs,
                const std::vector<std::string>& hyps) {
  if (refs.size() != hyps.size()) {
    throw DataError("CountMismatch",
                    std::to_string(refs.size()) + " references vs " +
                        std::to_string(hyps.size()) + " hypotheses");
  }
  if (refs.empty()) return 0.0;
  long correct = 0;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (refs[i] == hyps[i]) ++correct;
  }
  return static_cast<double>(correct) / refs.size();
}

std::string ScoreReport::ToJson() const {
  nlohmann::json j;
  j["wer"] = wer;
  j["cer"] = cer;
  j["word"] = {{"substitutions", word_substitutions},
               {"insertions", word_insertions},
               {"deletions", word_deletions},
               {"ref_tokens", n_ref_words}};
  j["char"] = {{"substitutions", char_substitutions},
               {"insertions", char_insertions},
               {"deletions", char_deletions},
               {"ref_tokens", n_ref_chars}};
  j["utterances"] = n_utterances;
  return j.dump(2);
}

std::string ScoreReport::ToTable() const {
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "WER %.2f%%  CER %.2f%%  (%ld utts, %ld words, %ld chars)",
                wer * 100.0, cer * 100.0, n_utterances, n_ref_words,
                n_ref_chars);
  return buf;
}

}  // namespace sawt::eval
