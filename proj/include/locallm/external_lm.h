// external_lm.h
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
//
// Per-token log-probabilities produced by an outside model.
//
// File format: UTF-8 TSV with columns sent_idx, tok_idx, word, logprob
// (natural log). Lines starting with '#' are comments; a first line whose
// first field is literally "sent_idx" is taken as a header. Within a
// sentence tok_idx must run 0, 1, 2, ...; sentences must appear in
// increasing order. A series carries no distribution over the vocabulary,
// so it can be mixed additively per token but never multiplicatively.

#ifndef LOCALLM_EXTERNAL_LM_H_
#define LOCALLM_EXTERNAL_LM_H_

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "locallm/corpus.h"
#include "locallm/interpolation.h"

namespace locallm {

struct TokenLogProb {
  std::size_t sent_idx = 0;
  std::size_t tok_idx = 0;
  std::string word;
  double logprob = 0.0;
};

class TokenLogProbSeries {
 public:
  TokenLogProbSeries() = default;
  TokenLogProbSeries(std::vector<TokenLogProb> records, std::string source_label);

  const std::vector<TokenLogProb> &records() const { return records_; }
  const std::string &source_label() const { return source_label_; }
  std::size_t sentence_count() const { return sentence_offsets_.size(); }
  // Records of sentence `sent`; empty when the sentence is absent.
  std::span<const TokenLogProb> Sentence(std::size_t sent) const;

  // Throws LookupError when the record does not exist.
  const TokenLogProb &At(std::size_t sent, std::size_t tok) const;

  // Negated stored log-probability, in nats.
  double SurprisalOf(std::size_t sent, std::size_t tok) const;

  // Checks that sentence i of the series has exactly one record per
  // predicted token of sentence i of `stream` (words plus </s>) and that
  // the words agree after vocabulary mapping. Throws AlignmentError.
  void CheckAlignment(const TokenStream &stream, const Vocabulary &vocab) const;

  void WriteTsv(std::ostream &out) const;

 private:
  std::vector<TokenLogProb> records_;
  std::string source_label_;
  // sentence_offsets_[s] = index of the first record of sentence s, or
  // records_.size() + 1 for a sentence with no records.
  std::vector<std::size_t> sentence_offsets_;
  std::vector<std::size_t> sentence_sizes_;
};

// Parses and validates a series. Rejects non-numeric or positive
// log-probabilities and out-of-order indices with a ParseError.
TokenLogProbSeries LoadTokenLogProbs(std::istream &in, const std::string &source);
TokenLogProbSeries LoadTokenLogProbsFile(const std::string &path);

// Scores every predicted token of `stream` with `lm` in the series layout.
TokenLogProbSeries ScoreStream(const LanguageModel &lm, const TokenStream &stream,
                               const std::string &label);

// Per-token mixture of a series with an in-process model, aligned to
// `stream`. Only additive mixing is possible; multiplicative mode throws
// CapabilityError because the series has no per-context normalizer.
TokenLogProbSeries MixWithSeries(const TokenLogProbSeries &series,
                                 const LanguageModel &local,
                                 const TokenStream &stream,
                                 InterpolationMode mode, double gamma);

}  // namespace locallm

#endif  // LOCALLM_EXTERNAL_LM_H_
