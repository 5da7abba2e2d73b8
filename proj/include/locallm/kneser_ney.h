// kneser_ney.h
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
// Interpolated modified Kneser-Ney estimation and the backoff-form model it
// produces.
//
// For order j, context h and word w with adjusted count a(hw):
//
//   p_j(w|h) = (max(a(hw) - D_j(a(hw)), 0) + M(h) p_{j-1}(w|h')) / T(h)
//
// where T(h) sums a(h.) over the vocabulary, M(h) = D1 N1(h.) + D2 N2(h.)
// + D3+ N3+(h.), and h' drops the oldest word of h. An unseen context
// (T(h) = 0) passes p_{j-1} through unchanged. p_0 is uniform over the
// predictable vocabulary. The model is stored as ARPA-style entries: the
// interpolated probability of every n-gram with a(hw) > 0 and, for every
// observed context, the backoff weight M(h) / T(h).

#ifndef LOCALLM_KNESER_NEY_H_
#define LOCALLM_KNESER_NEY_H_

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "locallm/language_model.h"
#include "locallm/ngram.h"

namespace locallm {

// Discounts of one order, computed from counts-of-counts n1..n4 as
//   Y = n1 / (n1 + 2 n2),  D1 = 1 - 2Y n2/n1,  D2 = 2 - 3Y n3/n2,
//   D3+ = 3 - 4Y n4/n3.
// A discount whose formula needs a zero count-of-counts, or that lands
// outside [0, bucket), is replaced by kFallbackDiscount.
struct OrderDiscounts {
  static constexpr double kFallbackDiscount = 0.5;

  std::array<std::uint64_t, 4> counts_of_counts{};
  std::array<double, 3> d{kFallbackDiscount, kFallbackDiscount,
                          kFallbackDiscount};
  std::array<bool, 3> fallback{true, true, true};

  // Discount applied to an n-gram with adjusted count `count`.
  double For(std::uint64_t count) const {
    if (count == 0) return 0.0;
    return d[count >= 3 ? 2 : count - 1];
  }

  static OrderDiscounts FromCountsOfCounts(const std::array<std::uint64_t, 4> &n);
};

struct NGramEntry {
  double log_prob = 0.0;
  // Zero unless the n-gram is itself an observed context.
  double log_backoff = 0.0;
};

class KneserNeyLM : public LanguageModel {
 public:
  // `entries[j - 1]` holds the j-grams. Every predictable unigram must be
  // present. `discounts` may be empty (models read back from ARPA text).
  KneserNeyLM(std::shared_ptr<const Vocabulary> vocab,
              std::vector<NGramMap<NGramEntry>> entries,
              std::vector<OrderDiscounts> discounts = {});

  const Vocabulary &vocab() const override { return *vocab_; }
  std::shared_ptr<const Vocabulary> shared_vocab() const { return vocab_; }
  int ContextLength() const override { return order() - 1; }
  int order() const { return static_cast<int>(entries_.size()); }

  double LogProb(WordId word, std::span<const WordId> context) const override;
  LogDistribution FullDistribution(std::span<const WordId> context) const override;

  const NGramMap<NGramEntry> &entries(int j) const { return entries_.at(j - 1); }
  const std::vector<OrderDiscounts> &discounts() const { return discounts_; }

  // Stored entry for `g`, or nullptr.
  const NGramEntry *Find(const NGram &g) const;

  // Contexts h of length j - 1 that have at least one stored j-gram hw.
  std::size_t ObservedContextCount(int j) const;
  std::vector<NGram> ObservedContexts(int j) const;

 private:
  WordId Clamp(WordId w) const { return w < vocab_->size() ? w : kUnkId; }

  std::shared_ptr<const Vocabulary> vocab_;
  std::vector<NGramMap<NGramEntry>> entries_;
  std::vector<OrderDiscounts> discounts_;
  // successors_[j - 1]: context of length j - 1 -> words stored after it.
  std::vector<NGramMap<std::vector<WordId>>> successors_;
  LogDistribution unigram_;
};

// Log10 probability written for <s>, following the usual ARPA convention.
inline constexpr double kBosLog10Prob = -99.0;

// Builds the model; `warnings` collects one line per fallback discount.
KneserNeyLM EstimateKneserNey(const NGramCountTable &counts,
                              std::shared_ptr<const Vocabulary> vocab,
                              std::vector<std::string> *warnings = nullptr);

// Counting plus estimation in one call.
KneserNeyLM TrainKneserNey(const TokenStream &stream,
                           std::shared_ptr<const Vocabulary> vocab, int order,
                           std::vector<std::string> *warnings = nullptr);

}  // namespace locallm

#endif  // LOCALLM_KNESER_NEY_H_
