// reading_time.h
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
// Fixation records, the exclusion protocol and the regression design.
//
// Fixation TSV columns, in order:
//
//   subject  text_id  word_index  word  gaze_ms  line_first  line_last
//   precedes_punct  has_nonalpha  prev_fixated
//
// gaze_ms is a positive number or NA; flags are 0/1 (true/false also
// accepted). Words are shown as displayed to the reader, punctuation
// attached.

#ifndef LOCALLM_READING_TIME_H_
#define LOCALLM_READING_TIME_H_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "locallm/external_lm.h"
#include "locallm/language_model.h"

namespace locallm {

struct FixationRecord {
  std::string subject;
  std::string text_id;
  long word_index = 0;
  std::string word;
  std::optional<double> gaze_ms;
  bool line_first = false;
  bool line_last = false;
  bool precedes_punct = false;
  bool has_nonalpha = false;
  bool prev_fixated = false;

  bool operator==(const FixationRecord &) const = default;
};

// Throws ParseError on malformed rows, non-positive gaze and word indices
// that do not increase within a (subject, text) pair.
std::vector<FixationRecord> LoadFixations(std::istream &in, const std::string &source);
std::vector<FixationRecord> LoadFixationsFile(const std::string &path);
void WriteFixations(const std::vector<FixationRecord> &records, std::ostream &out);

// A displayed word split into LM tokens: leading and trailing punctuation
// characters become tokens of their own, the rest is the lowercased core.
struct DisplayTokens {
  std::vector<std::string> tokens;
  // Index of the core in `tokens`, or -1 for a word made only of punctuation.
  int core = -1;
};
DisplayTokens SplitDisplayWord(const std::string &word);

struct TextWord {
  std::string word;
  bool line_first = false;
  bool line_last = false;
  bool precedes_punct = false;
  bool has_nonalpha = false;
};

// The texts behind a set of fixation records: text_id -> word_index ->
// word, pooled over subjects. Predecessor lookups go through the index,
// so excluding a record never changes how its neighbours are judged.
class TextIndex {
 public:
  // Throws AlignmentError when two records disagree about a word.
  static TextIndex FromRecords(const std::vector<FixationRecord> &records);

  void Add(const std::string &text_id, long word_index, const TextWord &word);
  const TextWord *Find(const std::string &text_id, long word_index) const;
  const std::map<std::string, std::map<long, TextWord>> &texts() const { return texts_; }

 private:
  std::map<std::string, std::map<long, TextWord>> texts_;
};

enum class ExclusionReason {
  kMissingGaze,
  kPrecedesPunct,
  kHasNonalpha,
  kLineBoundary,
  kOov,
  kPrevUninformative,
};
inline constexpr int kExclusionReasonCount = 6;
const char *ExclusionReasonName(ExclusionReason r);

struct ExclusionReport {
  std::size_t input = 0;
  std::size_t output = 0;
  // One count per reason; a record excluded for two reasons counts twice.
  std::array<std::size_t, kExclusionReasonCount> counts{};

  std::size_t Count(ExclusionReason r) const { return counts[static_cast<int>(r)]; }
  // TSV `reason<TAB>count`.
  void WriteTsv(std::ostream &out) const;
};

// Reasons that apply to `rec`; empty when the record is kept.
std::vector<ExclusionReason> ExclusionReasons(const FixationRecord &rec,
                                              const TextIndex &index,
                                              const Vocabulary &vocab);

std::vector<FixationRecord> ApplyExclusions(const std::vector<FixationRecord> &records,
                                            const Vocabulary &vocab,
                                            const TextIndex &index,
                                            ExclusionReport *report = nullptr);
// Same, with the index built from `records`.
std::vector<FixationRecord> ApplyExclusions(const std::vector<FixationRecord> &records,
                                            const Vocabulary &vocab,
                                            ExclusionReport *report = nullptr);

// Column layout of a design with local statistics of order k:
//
//   surprisal_n, surprisal_prev   base-model log-probability
//   logfreq_n, logfreq_prev       unigram log-probability
//   bigram_* or trigram_*         local log-probability (k = 2, 3 only)
//   loglen_n, loglen_prev         log character length of the word core
//   freq_x_len_n, freq_x_len_prev centered logfreq times centered loglen
//   prev_fixated                  0/1
//   word_number                   word_index within the text
//
// The probability and length columns are centered over the included rows;
// the subtracted means are kept in centering_means.
struct RegressionDataset {
  int local_order = 1;
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
  std::vector<double> response;
  std::vector<std::string> subjects;
  std::vector<std::string> text_ids;
  std::vector<long> word_indices;
  std::map<std::string, double> centering_means;

  std::size_t rows() const { return response.size(); }
  // Throws LookupError for an unknown column.
  const std::vector<double> &Column(const std::string &name) const;
  bool HasColumn(const std::string &name) const;

  void WriteTsv(std::ostream &out) const;
  static RegressionDataset ReadTsv(std::istream &in, const std::string &source);
  bool operator==(const RegressionDataset &) const = default;
};

// "unigram", "bigram", "trigram" for 1, 2, 3.
std::string LocalStatName(int local_order);
// Names of the local-statistic columns for `local_order` ("logfreq_n",
// "logfreq_prev" for order 1).
std::vector<std::string> LocalColumns(int local_order);

struct DesignModels {
  const LanguageModel *base = nullptr;
  const LanguageModel *unigram = nullptr;
  // Required for local_order 2 and 3.
  const LanguageModel *local = nullptr;
  // Replaces the base model for surprisal when set. Sentence s of the
  // series is the s-th LM sentence over the texts taken in text_id order.
  const TokenLogProbSeries *series = nullptr;
};

// The LM sentences of every text in `index`, in text_id order, as used for
// surprisal and local statistics. Sentences end after a ".", "!" or "?"
// token and at the end of each text.
TokenStream TextStream(const TextIndex &index, const Vocabulary &vocab);

// Builds the design for already filtered records. Throws AlignmentError
// naming the position when a record, its predecessor or a series entry
// cannot be matched to the text.
RegressionDataset BuildDesign(const std::vector<FixationRecord> &records,
                              const TextIndex &index, const DesignModels &models,
                              int local_order);

struct SyntheticSpec {
  std::size_t n = 50000;
  int subjects = 10;
  int local_order = 2;
  double intercept = 250.0;
  // Planted coefficient per design column; absent columns get 0.
  std::map<std::string, double> coefficients;
  double noise_sd = 50.0;
  double subject_sd = 25.0;
  double skip_rate = 0.2;
  int words_per_line = 12;
  int sentences_per_text = 20;
  // Drives the reading layout, skipping and subject offsets.
  std::uint64_t seed = 1;
  // Drives the residual noise only; defaults to `seed` when unset.
  std::optional<std::uint64_t> noise_seed;
};

struct SyntheticData {
  std::vector<FixationRecord> records;
  RegressionDataset dataset;
  std::vector<double> subject_offsets;
};

// Lays the tokenized `lines` out as texts read by every subject in turn,
// keeping each subject's share of n included rows, then draws
//
//   gaze = intercept + sum_j beta_j x_j + offset(subject) + N(0, noise_sd^2)
//
// with x_j the design columns computed from `models`. Subject offsets sum
// to zero.
SyntheticData GenerateSynthetic(const SyntheticSpec &spec,
                                const std::vector<std::vector<std::string>> &lines,
                                const Vocabulary &vocab, const DesignModels &models);

// Planted coefficients used when none are given.
std::map<std::string, double> DefaultSyntheticCoefficients(int local_order);

}  // namespace locallm

#endif  // LOCALLM_READING_TIME_H_
