// ngram.cc
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

#include "locallm/ngram.h"

#include <algorithm>
#include <ostream>
#include <string>

#include "locallm/error.h"

namespace locallm {

NGram::NGram(std::span<const WordId> ids) {
  if (ids.size() > static_cast<std::size_t>(kMaxOrder)) {
    throw Error("n-gram longer than " + std::to_string(kMaxOrder));
  }
  std::copy(ids.begin(), ids.end(), ids_.begin());
  size_ = static_cast<int>(ids.size());
}

NGram NGram::Slice(int begin, int end) const {
  NGram g;
  std::copy(ids_.begin() + begin, ids_.begin() + end, g.ids_.begin());
  g.size_ = end - begin;
  return g;
}

NGram NGram::Append(WordId w) const {
  if (size_ >= kMaxOrder) throw Error("n-gram capacity exceeded");
  NGram g = *this;
  g.ids_[size_] = w;
  ++g.size_;
  return g;
}

std::size_t NGram::Hash() const {
  // splitmix64 finalizer over the packed words
  std::uint64_t h = static_cast<std::uint64_t>(size_) * 0x9e3779b97f4a7c15ULL;
  for (int i = 0; i < size_; ++i) {
    h ^= ids_[i] + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= h >> 30;
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 27;
    h *= 0x94d049bb133111ebULL;
    h ^= h >> 31;
  }
  return static_cast<std::size_t>(h);
}

NGramCountTable::NGramCountTable(int order)
    : order_(order), counts_(std::max(order, 0)),
      continuation_(std::max(order - 1, 0)) {
  if (order < 1 || order > kMaxOrder) {
    throw Error("n-gram order must be in 1.." + std::to_string(kMaxOrder) +
                ", got " + std::to_string(order));
  }
}

void NGramCountTable::AddSentence(std::span<const WordId> s) {
  const int len = static_cast<int>(s.size());
  for (int end = 1; end < len; ++end) {
    for (int j = 1; j <= order_ && end - j + 1 >= 0; ++j) {
      ++counts_[j - 1][NGram(s.subspan(end - j + 1, j))];
    }
  }
}

void NGramCountTable::AddStream(const TokenStream &stream) {
  for (const auto &s : stream.sentences) AddSentence(s);
}

void NGramCountTable::Merge(const NGramCountTable &other) {
  if (other.order_ != order_) throw Error("cannot merge count tables of different order");
  for (int j = 0; j < order_; ++j) {
    for (const auto &[g, c] : other.counts_[j]) counts_[j][g] += c;
  }
  Finalize();
}

void NGramCountTable::Finalize() {
  for (int j = 1; j < order_; ++j) {
    auto &cont = continuation_[j - 1];
    cont.clear();
    cont.reserve(counts_[j - 1].size());
    for (const auto &entry : counts_[j]) ++cont[entry.first.Suffix()];
  }
}

std::uint64_t NGramCountTable::Count(const NGram &g) const {
  if (g.empty() || g.size() > order_) return 0;
  const auto &m = counts_[g.size() - 1];
  auto it = m.find(g);
  return it == m.end() ? 0 : it->second;
}

std::uint64_t NGramCountTable::ContinuationCount(const NGram &g) const {
  if (g.empty() || g.size() >= order_) return 0;
  const auto &m = continuation_[g.size() - 1];
  auto it = m.find(g);
  return it == m.end() ? 0 : it->second;
}

std::uint64_t NGramCountTable::AdjustedCount(const NGram &g) const {
  if (g.size() == order_ || g[0] == kBosId) return Count(g);
  return ContinuationCount(g);
}

void NGramCountTable::WriteTsv(std::ostream &out, const Vocabulary &vocab) const {
  for (int j = 1; j <= order_; ++j) {
    std::vector<std::pair<std::string, std::uint64_t>> rows;
    rows.reserve(counts_[j - 1].size());
    for (const auto &[g, c] : counts_[j - 1]) {
      std::string text;
      for (int i = 0; i < g.size(); ++i) {
        if (i) text.push_back(' ');
        text += vocab.Word(g[i]);
      }
      rows.emplace_back(std::move(text), c);
    }
    std::sort(rows.begin(), rows.end());
    for (const auto &[text, c] : rows) out << text << '\t' << c << '\n';
  }
}

NGramCountTable CountNGrams(const TokenStream &stream, int order) {
  NGramCountTable table(order);
  if (stream.empty()) throw Error("cannot count n-grams of an empty stream");
  table.AddStream(stream);
  table.Finalize();
  return table;
}

}  // namespace locallm
