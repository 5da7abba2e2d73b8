// ngram.h
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
// N-gram keys and raw/continuation count tables.

#ifndef LOCALLM_NGRAM_H_
#define LOCALLM_NGRAM_H_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <vector>

#include "locallm/corpus.h"

namespace locallm {

inline constexpr int kMaxOrder = 5;

// Fixed-capacity token tuple, usable as a hash key. Slots past size() are
// zero so that equality and hashing can look at the whole array.
class NGram {
 public:
  NGram() = default;
  explicit NGram(std::span<const WordId> ids);

  int size() const { return size_; }
  bool empty() const { return size_ == 0; }
  WordId operator[](int i) const { return ids_[i]; }
  WordId back() const { return ids_[size_ - 1]; }
  std::span<const WordId> ids() const { return {ids_.data(), std::size_t(size_)}; }

  // All but the first token.
  NGram Suffix() const { return Slice(1, size_); }
  // All but the last token.
  NGram Prefix() const { return Slice(0, size_ - 1); }
  NGram Slice(int begin, int end) const;
  NGram Append(WordId w) const;

  bool operator==(const NGram &o) const {
    return size_ == o.size_ && ids_ == o.ids_;
  }

  std::size_t Hash() const;

 private:
  std::array<WordId, kMaxOrder> ids_{};
  int size_ = 0;
};

struct NGramHash {
  std::size_t operator()(const NGram &g) const { return g.Hash(); }
};

template <typename V>
using NGramMap = std::unordered_map<NGram, V, NGramHash>;

// Exact j-gram counts for j = 1..order over sentence-bounded windows, plus
// the number of distinct left extensions of every j-gram with j < order.
//
// A window is counted when its last token is a predicted event, so the
// unigram <s> never appears and the unigram counts sum to the number of
// predicted tokens.
class NGramCountTable {
 public:
  explicit NGramCountTable(int order);

  int order() const { return order_; }

  // Adds every window of `stream`. Continuation counts go stale until
  // Finalize() is called.
  void AddStream(const TokenStream &stream);
  void AddSentence(std::span<const WordId> padded_sentence);

  // Raw-count addition; shards may be counted separately and merged in any
  // order. Recomputes continuation counts.
  void Merge(const NGramCountTable &other);

  // Rebuilds continuation counts from the raw tables.
  void Finalize();

  // counts(j) holds the j-grams, j in 1..order.
  const NGramMap<std::uint64_t> &counts(int j) const { return counts_.at(j - 1); }
  // continuation(j) for j in 1..order-1.
  const NGramMap<std::uint64_t> &continuation(int j) const {
    return continuation_.at(j - 1);
  }

  std::uint64_t Count(const NGram &g) const;
  std::uint64_t ContinuationCount(const NGram &g) const;

  // The count Kneser-Ney discounts: raw counts at the highest order and for
  // n-grams starting with <s>, continuation counts otherwise.
  std::uint64_t AdjustedCount(const NGram &g) const;

  // Debug dump: `w1 w2 ..<TAB>count`, orders ascending, lines sorted.
  void WriteTsv(std::ostream &out, const Vocabulary &vocab) const;

 private:
  int order_;
  std::vector<NGramMap<std::uint64_t>> counts_;
  std::vector<NGramMap<std::uint64_t>> continuation_;
};

// Counts a whole stream. Throws on order outside 1..kMaxOrder or an empty
// stream.
NGramCountTable CountNGrams(const TokenStream &stream, int order);

}  // namespace locallm

#endif  // LOCALLM_NGRAM_H_
