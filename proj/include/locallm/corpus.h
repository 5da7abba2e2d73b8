// corpus.h
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
// Tokenization, vocabulary and encoded sentence streams.
//
// Text is one sentence per line. Tokens are the whitespace-separated
// fields of the lowercased line; blank lines are skipped. Every encoded
// sentence is bracketed as <s> w1 .. wn </s>. The begin sentinel is only
// ever conditioned on; the end sentinel is a predicted event.

#ifndef LOCALLM_CORPUS_H_
#define LOCALLM_CORPUS_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace locallm {

using WordId = std::uint32_t;

inline constexpr WordId kBosId = 0;
inline constexpr WordId kEosId = 1;
inline constexpr WordId kUnkId = 2;

inline constexpr std::string_view kBosWord = "<s>";
inline constexpr std::string_view kEosWord = "</s>";
inline constexpr std::string_view kUnkWord = "<unk>";

// Bidirectional word <-> id map. Ids 0, 1, 2 are always <s>, </s>, <unk>;
// regular words follow by descending training count, ties broken by first
// occurrence. Immutable once built.
class Vocabulary {
 public:
  // Vocabulary holding only the three special tokens.
  Vocabulary();

  // Builds from an explicit word list (specials excluded; they are added).
  // Duplicate words are an error.
  explicit Vocabulary(const std::vector<std::string> &words,
                      const std::vector<std::uint64_t> &counts = {});

  std::size_t size() const { return words_.size(); }

  // Number of items that can be predicted, i.e. everything but <s>.
  std::size_t predictable_size() const { return words_.size() - 1; }

  // Id of `word`, or kUnkId when absent. `word` must already be lowercased.
  WordId Lookup(std::string_view word) const;
  bool Contains(std::string_view word) const;

  const std::string &Word(WordId id) const { return words_.at(id); }
  std::uint64_t Count(WordId id) const { return counts_.at(id); }
  const std::vector<std::string> &words() const { return words_; }

  bool operator==(const Vocabulary &other) const {
    return words_ == other.words_;
  }

  // TSV `word<TAB>id<TAB>count`, one line per entry, sorted by id.
  void WriteTsv(std::ostream &out) const;
  static Vocabulary ReadTsv(std::istream &in, const std::string &source);

 private:
  std::vector<std::string> words_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, WordId> ids_;
};

// Encoded sentences, each stored as [<s>, w1, .., wn, </s>].
struct TokenStream {
  std::vector<std::vector<WordId>> sentences;

  bool empty() const { return sentences.empty(); }
  // Predicted tokens: words plus one end sentinel per sentence.
  std::size_t PredictedTokenCount() const;
};

// Lowercases and splits one line on whitespace.
std::vector<std::string> Tokenize(std::string_view line);

// Reads all lines of `in`, tokenizing each; blank lines are dropped.
std::vector<std::vector<std::string>> ReadTokenizedLines(std::istream &in);

// Throws Error("empty corpus") if the input holds no tokens.
Vocabulary BuildVocabulary(const std::vector<std::vector<std::string>> &lines,
                           std::uint64_t min_count);
Vocabulary BuildVocabulary(std::istream &text, std::uint64_t min_count);

TokenStream Encode(const std::vector<std::vector<std::string>> &lines,
                   const Vocabulary &vocab);
TokenStream Encode(std::istream &text, const Vocabulary &vocab);

// Inverse of Encode up to OOV replacement: one line per sentence, words
// joined by single spaces, sentinels dropped.
std::string Decode(const TokenStream &stream, const Vocabulary &vocab);

// Reads a whole text file into a TokenStream; throws on unreadable paths.
TokenStream EncodeFile(const std::string &path, const Vocabulary &vocab);
Vocabulary BuildVocabularyFromFile(const std::string &path,
                                   std::uint64_t min_count);

}  // namespace locallm

#endif  // LOCALLM_CORPUS_H_
