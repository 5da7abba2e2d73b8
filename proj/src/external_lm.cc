// external_lm.cc
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

#include "locallm/external_lm.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "locallm/error.h"

namespace locallm {
namespace {

std::vector<std::string> SplitTabs(const std::string &line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

bool ParseIndex(const std::string &s, std::size_t *out) {
  const char *end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, *out);
  return ec == std::errc() && ptr == end;
}

bool ParseReal(const std::string &s, double *out) {
  const char *end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, *out);
  return ec == std::errc() && ptr == end;
}

std::string FormatReal(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10f", x);
  return buf;
}

}  // namespace

TokenLogProbSeries::TokenLogProbSeries(std::vector<TokenLogProb> records,
                                       std::string source_label)
    : records_(std::move(records)), source_label_(std::move(source_label)) {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const TokenLogProb &r = records_[i];
    if (!std::isfinite(r.logprob) || r.logprob > 0) {
      throw Error("record " + std::to_string(i) + ": log-probability must be finite and <= 0");
    }
    const bool new_sentence = i == 0 || r.sent_idx != records_[i - 1].sent_idx;
    if (new_sentence) {
      if (i > 0 && r.sent_idx < records_[i - 1].sent_idx) {
        throw Error("record " + std::to_string(i) + ": sentence indices must increase");
      }
      if (r.tok_idx != 0) {
        throw Error("record " + std::to_string(i) + ": sentence must start at tok_idx 0");
      }
      sentence_offsets_.resize(r.sent_idx + 1, records_.size() + 1);
      sentence_sizes_.resize(r.sent_idx + 1, 0);
      sentence_offsets_[r.sent_idx] = i;
    } else if (r.tok_idx != records_[i - 1].tok_idx + 1) {
      throw Error("record " + std::to_string(i) + ": token indices must run 0, 1, 2, ...");
    }
    ++sentence_sizes_[r.sent_idx];
  }
}

std::span<const TokenLogProb> TokenLogProbSeries::Sentence(std::size_t sent) const {
  if (sent >= sentence_offsets_.size() || sentence_sizes_[sent] == 0) return {};
  return std::span<const TokenLogProb>(records_).subspan(sentence_offsets_[sent],
                                                         sentence_sizes_[sent]);
}

const TokenLogProb &TokenLogProbSeries::At(std::size_t sent, std::size_t tok) const {
  const auto s = Sentence(sent);
  if (tok >= s.size()) {
    throw LookupError("no log-probability for sentence " + std::to_string(sent) +
                      ", token " + std::to_string(tok));
  }
  return s[tok];
}

double TokenLogProbSeries::SurprisalOf(std::size_t sent, std::size_t tok) const {
  return -At(sent, tok).logprob;
}

void TokenLogProbSeries::CheckAlignment(const TokenStream &stream,
                                        const Vocabulary &vocab) const {
  for (std::size_t s = 0; s < stream.sentences.size(); ++s) {
    const auto &ids = stream.sentences[s];
    const auto recs = Sentence(s);
    if (recs.size() != ids.size() - 1) {
      throw AlignmentError("sentence " + std::to_string(s) + ": series has " +
                           std::to_string(recs.size()) + " tokens, text has " +
                           std::to_string(ids.size() - 1));
    }
    for (std::size_t t = 0; t < recs.size(); ++t) {
      const auto tokens = Tokenize(recs[t].word);
      const WordId id = tokens.size() == 1 ? vocab.Lookup(tokens[0]) : kUnkId;
      if (id != ids[t + 1]) {
        throw AlignmentError("sentence " + std::to_string(s) + ", token " +
                             std::to_string(t) + ": series word '" + recs[t].word +
                             "' does not match text word '" + vocab.Word(ids[t + 1]) +
                             "'");
      }
    }
  }
  if (sentence_count() > stream.sentences.size()) {
    throw AlignmentError("series has " + std::to_string(sentence_count()) +
                         " sentences, text has " +
                         std::to_string(stream.sentences.size()));
  }
}

void TokenLogProbSeries::WriteTsv(std::ostream &out) const {
  out << "sent_idx\ttok_idx\tword\tlogprob\n";
  for (const auto &r : records_) {
    out << r.sent_idx << '\t' << r.tok_idx << '\t' << r.word << '\t'
        << FormatReal(r.logprob) << '\n';
  }
}

TokenLogProbSeries LoadTokenLogProbs(std::istream &in, const std::string &source) {
  std::vector<TokenLogProb> records;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto f = SplitTabs(line);
    if (first && !f.empty() && f[0] == "sent_idx") {
      first = false;
      continue;
    }
    first = false;
    if (f.size() != 4) throw ParseError(source, lineno, "expected 4 tab-separated columns");
    TokenLogProb r;
    if (!ParseIndex(f[0], &r.sent_idx) || !ParseIndex(f[1], &r.tok_idx)) {
      throw ParseError(source, lineno, "bad sentence or token index");
    }
    r.word = f[2];
    if (!ParseReal(f[3], &r.logprob) || !std::isfinite(r.logprob)) {
      throw ParseError(source, lineno, "non-numeric log-probability '" + f[3] + "'");
    }
    if (r.logprob > 0) {
      throw ParseError(source, lineno, "positive log-probability " + f[3]);
    }
    if (!records.empty()) {
      const TokenLogProb &prev = records.back();
      const bool same = r.sent_idx == prev.sent_idx;
      if ((same && r.tok_idx != prev.tok_idx + 1) || (!same && r.sent_idx < prev.sent_idx) ||
          (!same && r.tok_idx != 0)) {
        throw ParseError(source, lineno, "misaligned indices (" + f[0] + ", " + f[1] + ")");
      }
    } else if (r.tok_idx != 0) {
      throw ParseError(source, lineno, "misaligned indices (" + f[0] + ", " + f[1] + ")");
    }
    records.push_back(std::move(r));
  }
  return TokenLogProbSeries(std::move(records), source);
}

TokenLogProbSeries LoadTokenLogProbsFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return LoadTokenLogProbs(in, path);
}

TokenLogProbSeries ScoreStream(const LanguageModel &lm, const TokenStream &stream,
                               const std::string &label) {
  std::vector<TokenLogProb> records;
  records.reserve(stream.PredictedTokenCount());
  const Vocabulary &vocab = lm.vocab();
  for (std::size_t s = 0; s < stream.sentences.size(); ++s) {
    const auto &ids = stream.sentences[s];
    for (std::size_t t = 1; t < ids.size(); ++t) {
      const std::span<const WordId> ctx(ids.data(), t);
      records.push_back({s, t - 1, vocab.Word(ids[t]), lm.LogProb(ids[t], ctx)});
    }
  }
  return TokenLogProbSeries(std::move(records), label);
}

TokenLogProbSeries MixWithSeries(const TokenLogProbSeries &series,
                                 const LanguageModel &local, const TokenStream &stream,
                                 InterpolationMode mode, double gamma) {
  if (mode == InterpolationMode::kMultiplicative) {
    throw CapabilityError("a per-token log-probability series has no full distribution; "
                          "it cannot be interpolated multiplicatively");
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw Error("interpolation weight must lie in [0, 1]");
  }
  series.CheckAlignment(stream, local.vocab());
  std::vector<TokenLogProb> out;
  out.reserve(series.records().size());
  for (std::size_t s = 0; s < stream.sentences.size(); ++s) {
    const auto &ids = stream.sentences[s];
    for (std::size_t t = 1; t < ids.size(); ++t) {
      const TokenLogProb &r = series.At(s, t - 1);
      const std::span<const WordId> ctx(ids.data(), t);
      out.push_back({s, t - 1, r.word,
                     MixAdditive(local.LogProb(ids[t], ctx), r.logprob, gamma)});
    }
  }
  return TokenLogProbSeries(std::move(out), series.source_label() + "+local");
}

}  // namespace locallm
