// arpa.cc
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

#include "locallm/arpa.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "locallm/error.h"
#include "locallm/numeric.h"

namespace locallm {
namespace {

std::string FormatLog10(double natural_log) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.7g", natural_log / kLn10);
  return buf;
}

std::vector<std::pair<NGram, const NGramEntry *>> SortedEntries(
    const NGramMap<NGramEntry> &m) {
  std::vector<std::pair<NGram, const NGramEntry *>> rows;
  rows.reserve(m.size());
  for (const auto &kv : m) rows.emplace_back(kv.first, &kv.second);
  std::sort(rows.begin(), rows.end(), [](const auto &a, const auto &b) {
    const auto x = a.first.ids(), y = b.first.ids();
    return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
  });
  return rows;
}

std::vector<std::string_view> SplitWhitespace(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool ParseDouble(std::string_view s, double *out) {
  const char *end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, *out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

void WriteArpa(const KneserNeyLM &lm, std::ostream &out) {
  const Vocabulary &vocab = lm.vocab();
  const int order = lm.order();
  out << "\n\\data\\\n";
  for (int j = 1; j <= order; ++j) {
    out << "ngram " << j << "=" << lm.entries(j).size() << "\n";
  }
  for (int j = 1; j <= order; ++j) {
    out << "\n\\" << j << "-grams:\n";
    const bool with_backoff = j < order;
    auto rows = SortedEntries(lm.entries(j));
    for (const auto &[g, e] : rows) {
      if (j == 1 && g[0] == kBosId) {
        out << kBosLog10Prob;
      } else {
        out << FormatLog10(e->log_prob);
      }
      out << '\t';
      for (int i = 0; i < g.size(); ++i) {
        if (i) out << ' ';
        out << vocab.Word(g[i]);
      }
      if (with_backoff) out << '\t' << FormatLog10(e->log_backoff);
      out << '\n';
    }
  }
  out << "\n\\end\\\n";
}

KneserNeyLM ReadArpa(std::istream &in, const std::string &source) {
  std::string line;
  std::size_t lineno = 0;
  auto next_nonblank = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!SplitWhitespace(line).empty()) return true;
    }
    return false;
  };

  if (!next_nonblank() || line != "\\data\\") {
    throw ParseError(source, lineno, "expected \\data\\ header");
  }
  std::vector<std::size_t> declared;
  while (next_nonblank() && line.rfind("ngram ", 0) == 0) {
    const auto eq = line.find('=');
    int j = 0;
    long long n = -1;
    if (eq == std::string::npos ||
        std::sscanf(line.c_str(), "ngram %d=%lld", &j, &n) != 2 || n < 0) {
      throw ParseError(source, lineno, "malformed count line '" + line + "'");
    }
    if (j != static_cast<int>(declared.size()) + 1) {
      throw ParseError(source, lineno, "ngram counts must list orders 1, 2, ... in turn");
    }
    declared.push_back(static_cast<std::size_t>(n));
  }
  if (declared.empty() || declared.size() > static_cast<std::size_t>(kMaxOrder)) {
    throw ParseError(source, lineno, "no usable ngram count lines");
  }
  const int order = static_cast<int>(declared.size());

  // Raw rows are kept as strings until the unigram section fixes the ids.
  std::vector<std::string> words;
  std::unordered_map<std::string, WordId> ids{{std::string(kBosWord), kBosId},
                                              {std::string(kEosWord), kEosId},
                                              {std::string(kUnkWord), kUnkId}};
  std::vector<NGramMap<NGramEntry>> entries(order);
  std::shared_ptr<const Vocabulary> vocab;

  for (int j = 1; j <= order; ++j) {
    const std::string header = "\\" + std::to_string(j) + "-grams:";
    if (line != header) {
      throw ParseError(source, lineno, "expected section header " + header);
    }
    std::size_t seen = 0;
    bool more = next_nonblank();
    for (; more && line[0] != '\\'; more = next_nonblank()) {
      const auto fields = SplitWhitespace(line);
      const std::size_t want = 1 + j;
      if (fields.size() != want && !(j < order && fields.size() == want + 1)) {
        throw ParseError(source, lineno,
                         "expected " + std::to_string(j) + " words in a " +
                             std::to_string(j) + "-gram entry");
      }
      NGramEntry e;
      if (!ParseDouble(fields[0], &e.log_prob)) {
        throw ParseError(source, lineno, "bad probability '" + std::string(fields[0]) + "'");
      }
      if (fields.size() == want + 1 && !ParseDouble(fields[want], &e.log_backoff)) {
        throw ParseError(source, lineno, "bad backoff '" + std::string(fields[want]) + "'");
      }
      if (e.log_prob > 0) throw ParseError(source, lineno, "positive log probability");
      e.log_prob *= kLn10;
      e.log_backoff *= kLn10;

      std::array<WordId, kMaxOrder> g{};
      for (int i = 0; i < j; ++i) {
        const std::string w(fields[1 + i]);
        auto it = ids.find(w);
        if (j == 1 && it == ids.end()) {
          it = ids.emplace(w, static_cast<WordId>(3 + words.size())).first;
          words.push_back(w);
        } else if (it == ids.end()) {
          throw ParseError(source, lineno, "word '" + w + "' has no unigram entry");
        }
        g[i] = it->second;
      }
      const NGram key(std::span<const WordId>(g.data(), j));
      if (!entries[j - 1].emplace(key, e).second) {
        throw ParseError(source, lineno, "duplicate entry");
      }
      ++seen;
    }
    if (seen != declared[j - 1]) {
      throw ParseError(source, lineno,
                       "section " + header + " declares " +
                           std::to_string(declared[j - 1]) + " entries but has " +
                           std::to_string(seen));
    }
    if (!more) throw ParseError(source, lineno, "unexpected end of file");
  }
  if (line != "\\end\\") throw ParseError(source, lineno, "expected \\end\\");

  vocab = std::make_shared<const Vocabulary>(words);
  for (WordId w = 0; w < vocab->size(); ++w) {
    const NGram g(std::span<const WordId>(&w, 1));
    if (!entries[0].count(g)) {
      throw ParseError(source, lineno, "missing unigram '" + vocab->Word(w) + "'");
    }
  }
  return KneserNeyLM(std::move(vocab), std::move(entries));
}

void WriteArpaFile(const KneserNeyLM &lm, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  WriteArpa(lm, out);
  if (!out) throw Error("write failed for '" + path + "'");
}

KneserNeyLM ReadArpaFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return ReadArpa(in, path);
}

}  // namespace locallm
