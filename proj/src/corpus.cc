// corpus.cc
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

#include "locallm/corpus.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "locallm/error.h"

namespace locallm {

Vocabulary::Vocabulary() : Vocabulary(std::vector<std::string>{}) {}

// `counts`, when given, is indexed by id and so has words.size() + 3 entries.
Vocabulary::Vocabulary(const std::vector<std::string> &words,
                       const std::vector<std::uint64_t> &counts) {
  words_.reserve(words.size() + 3);
  words_.emplace_back(kBosWord);
  words_.emplace_back(kEosWord);
  words_.emplace_back(kUnkWord);
  words_.insert(words_.end(), words.begin(), words.end());
  if (counts.empty()) {
    counts_.assign(words_.size(), 0);
  } else if (counts.size() == words_.size()) {
    counts_ = counts;
  } else {
    throw Error("vocabulary: count list has " + std::to_string(counts.size()) +
                " entries for " + std::to_string(words_.size()) + " words");
  }
  ids_.reserve(words_.size());
  for (WordId id = 0; id < words_.size(); ++id) {
    if (!ids_.emplace(words_[id], id).second) {
      throw Error("vocabulary: duplicate word '" + words_[id] + "'");
    }
  }
}

WordId Vocabulary::Lookup(std::string_view word) const {
  auto it = ids_.find(std::string(word));
  return it == ids_.end() ? kUnkId : it->second;
}

bool Vocabulary::Contains(std::string_view word) const {
  return ids_.count(std::string(word)) > 0;
}

void Vocabulary::WriteTsv(std::ostream &out) const {
  for (WordId id = 0; id < words_.size(); ++id) {
    out << words_[id] << '\t' << id << '\t' << counts_[id] << '\n';
  }
}

Vocabulary Vocabulary::ReadTsv(std::istream &in, const std::string &source) {
  std::vector<std::string> words;
  std::vector<std::uint64_t> counts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string word;
    long long id = -1;
    long long count = -1;
    if (!std::getline(fields, word, '\t') || !(fields >> id >> count) ||
        count < 0) {
      throw ParseError(source, lineno, "expected word<TAB>id<TAB>count");
    }
    if (id != static_cast<long long>(counts.size())) {
      throw ParseError(source, lineno,
                       "ids must be dense and sorted; expected " +
                           std::to_string(counts.size()));
    }
    const bool special_slot = id < 3;
    const std::string_view expected =
        id == 0 ? kBosWord : id == 1 ? kEosWord : kUnkWord;
    if (special_slot && word != expected) {
      throw ParseError(source, lineno,
                       "id " + std::to_string(id) + " must be " +
                           std::string(expected));
    }
    if (!special_slot) words.push_back(word);
    counts.push_back(static_cast<std::uint64_t>(count));
  }
  if (counts.size() < 3) {
    throw ParseError(source, lineno, "vocabulary lacks the special tokens");
  }
  return Vocabulary(words, counts);
}

std::size_t TokenStream::PredictedTokenCount() const {
  std::size_t n = 0;
  for (const auto &s : sentences) n += s.size() - 1;
  return n;
}

std::vector<std::string> Tokenize(std::string_view line) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : line) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(
          static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<std::vector<std::string>> ReadTokenizedLines(std::istream &in) {
  std::vector<std::vector<std::string>> lines;
  std::string line;
  while (std::getline(in, line)) {
    auto tokens = Tokenize(line);
    if (!tokens.empty()) lines.push_back(std::move(tokens));
  }
  return lines;
}

namespace {

bool IsSentinel(std::string_view w) { return w == kBosWord || w == kEosWord; }

}  // namespace

Vocabulary BuildVocabulary(const std::vector<std::vector<std::string>> &lines,
                           std::uint64_t min_count) {
  struct Stat {
    std::uint64_t count = 0;
    std::size_t first = 0;
  };
  std::unordered_map<std::string, Stat> stats;
  std::vector<std::string> order;
  std::size_t tokens = 0;
  for (const auto &line : lines) {
    for (const auto &w : line) {
      ++tokens;
      auto [it, inserted] = stats.try_emplace(w);
      if (inserted) {
        it->second.first = order.size();
        order.push_back(w);
      }
      ++it->second.count;
    }
  }
  if (tokens == 0) throw Error("empty corpus");

  std::vector<std::string> kept;
  std::uint64_t unk_count = 0;
  for (const auto &w : order) {
    const Stat &s = stats.at(w);
    if (w == kUnkWord || IsSentinel(w) || s.count < min_count) {
      unk_count += s.count;
    } else {
      kept.push_back(w);
    }
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [&](const std::string &a, const std::string &b) {
                     return stats.at(a).count > stats.at(b).count;
                   });
  std::vector<std::uint64_t> counts;
  counts.reserve(kept.size() + 3);
  counts.push_back(lines.size());
  counts.push_back(lines.size());
  counts.push_back(unk_count);
  for (const auto &w : kept) counts.push_back(stats.at(w).count);
  return Vocabulary(kept, counts);
}

Vocabulary BuildVocabulary(std::istream &text, std::uint64_t min_count) {
  return BuildVocabulary(ReadTokenizedLines(text), min_count);
}

TokenStream Encode(const std::vector<std::vector<std::string>> &lines,
                   const Vocabulary &vocab) {
  TokenStream stream;
  stream.sentences.reserve(lines.size());
  for (const auto &line : lines) {
    std::vector<WordId> ids;
    ids.reserve(line.size() + 2);
    ids.push_back(kBosId);
    for (const auto &w : line) {
      ids.push_back(IsSentinel(w) ? kUnkId : vocab.Lookup(w));
    }
    ids.push_back(kEosId);
    stream.sentences.push_back(std::move(ids));
  }
  return stream;
}

TokenStream Encode(std::istream &text, const Vocabulary &vocab) {
  return Encode(ReadTokenizedLines(text), vocab);
}

std::string Decode(const TokenStream &stream, const Vocabulary &vocab) {
  std::string out;
  for (const auto &s : stream.sentences) {
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
      if (i > 1) out.push_back(' ');
      out += vocab.Word(s[i]);
    }
    out.push_back('\n');
  }
  return out;
}

namespace {

std::ifstream OpenText(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return in;
}

}  // namespace

TokenStream EncodeFile(const std::string &path, const Vocabulary &vocab) {
  auto in = OpenText(path);
  return Encode(in, vocab);
}

Vocabulary BuildVocabularyFromFile(const std::string &path,
                                   std::uint64_t min_count) {
  auto in = OpenText(path);
  return BuildVocabulary(in, min_count);
}

}  // namespace locallm
