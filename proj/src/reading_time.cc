// reading_time.cc
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

#include "locallm/reading_time.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <tuple>

#include "locallm/error.h"
#include "locallm/numeric.h"

namespace locallm {
namespace {

constexpr int kFixationColumns = 10;

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

bool ParseFlag(const std::string &s, bool *out) {
  if (s == "1" || s == "true" || s == "TRUE") {
    *out = true;
  } else if (s == "0" || s == "false" || s == "FALSE") {
    *out = false;
  } else {
    return false;
  }
  return true;
}

template <typename T>
bool ParseNumber(const std::string &s, T *out) {
  const char *end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, *out);
  return ec == std::errc() && ptr == end && !s.empty();
}

std::string FormatReal(double x, const char *fmt) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, x);
  return buf;
}

bool IsPunct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }
bool IsAlpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

bool IsSentenceEnd(const std::string &token) {
  return token == "." || token == "!" || token == "?";
}

WordId TokenId(const std::string &token, const Vocabulary &vocab) {
  if (token == kBosWord || token == kEosWord || token == kUnkWord) return kUnkId;
  return vocab.Lookup(token);
}

bool IsOov(const std::string &word, const Vocabulary &vocab) {
  const DisplayTokens t = SplitDisplayWord(word);
  if (t.core < 0) return true;
  return TokenId(t.tokens[t.core], vocab) == kUnkId;
}

std::string Position(const std::string &text_id, long word_index) {
  return "text '" + text_id + "' word " + std::to_string(word_index);
}

// LM sentences of all texts plus where each word's core token sits.
struct TextLayout {
  TokenStream stream;
  std::vector<std::vector<std::string>> tokens;
  // (text_id, word_index) -> (sentence, position within [<s>, ..]).
  std::map<std::pair<std::string, long>, std::pair<std::size_t, std::size_t>> where;
};

TextLayout BuildLayout(const TextIndex &index, const Vocabulary &vocab) {
  TextLayout layout;
  for (const auto &[text_id, words] : index.texts()) {
    std::vector<WordId> ids{kBosId};
    std::vector<std::string> toks{std::string(kBosWord)};
    auto close = [&]() {
      if (ids.size() == 1) return;
      ids.push_back(kEosId);
      toks.emplace_back(kEosWord);
      layout.stream.sentences.push_back(std::move(ids));
      layout.tokens.push_back(std::move(toks));
      ids.assign(1, kBosId);
      toks.assign(1, std::string(kBosWord));
    };
    long expected = words.empty() ? 0 : words.begin()->first;
    for (const auto &[word_index, w] : words) {
      if (word_index != expected) {
        throw AlignmentError(Position(text_id, expected) +
                             ": missing from the text (next present is word " +
                             std::to_string(word_index) + ")");
      }
      ++expected;
      const DisplayTokens dt = SplitDisplayWord(w.word);
      bool placed = false;
      for (int i = 0; i < static_cast<int>(dt.tokens.size()); ++i) {
        ids.push_back(TokenId(dt.tokens[i], vocab));
        toks.push_back(dt.tokens[i]);
        if (i == dt.core || (dt.core < 0 && i + 1 == static_cast<int>(dt.tokens.size()))) {
          layout.where[{text_id, word_index}] = {layout.stream.sentences.size(), ids.size() - 1};
          placed = true;
        }
        if (IsSentenceEnd(dt.tokens[i]) && i > dt.core) close();
      }
      if (!placed) throw AlignmentError(Position(text_id, word_index) + ": empty word");
    }
    close();
  }
  return layout;
}

}  // namespace

std::vector<FixationRecord> LoadFixations(std::istream &in, const std::string &source) {
  std::vector<FixationRecord> out;
  std::map<std::pair<std::string, std::string>, long> last_index;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto f = SplitTabs(line);
    if (first) {
      first = false;
      if (!f.empty() && f[0] == "subject") continue;
    }
    if (f.size() != kFixationColumns) {
      throw ParseError(source, lineno,
                       "expected " + std::to_string(kFixationColumns) + " columns, got " +
                           std::to_string(f.size()));
    }
    FixationRecord r;
    r.subject = f[0];
    r.text_id = f[1];
    if (r.subject.empty() || r.text_id.empty()) {
      throw ParseError(source, lineno, "empty subject or text id");
    }
    if (!ParseNumber(f[2], &r.word_index)) {
      throw ParseError(source, lineno, "bad word_index '" + f[2] + "'");
    }
    r.word = f[3];
    if (r.word.empty()) throw ParseError(source, lineno, "empty word");
    if (f[4] != "NA") {
      double g = 0;
      if (!ParseNumber(f[4], &g) || !std::isfinite(g)) {
        throw ParseError(source, lineno, "bad gaze_ms '" + f[4] + "'");
      }
      if (g <= 0) throw ParseError(source, lineno, "non-positive gaze_ms " + f[4]);
      r.gaze_ms = g;
    }
    bool *flags[] = {&r.line_first, &r.line_last, &r.precedes_punct, &r.has_nonalpha,
                     &r.prev_fixated};
    for (int i = 0; i < 5; ++i) {
      if (!ParseFlag(f[5 + i], flags[i])) {
        throw ParseError(source, lineno, "bad flag '" + f[5 + i] + "'");
      }
    }
    const auto key = std::make_pair(r.subject, r.text_id);
    auto it = last_index.find(key);
    if (it != last_index.end() && r.word_index <= it->second) {
      throw ParseError(source, lineno,
                       "word_index must increase within subject '" + r.subject +
                           "' and text '" + r.text_id + "'");
    }
    last_index[key] = r.word_index;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<FixationRecord> LoadFixationsFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return LoadFixations(in, path);
}

void WriteFixations(const std::vector<FixationRecord> &records, std::ostream &out) {
  out << "subject\ttext_id\tword_index\tword\tgaze_ms\tline_first\tline_last\t"
         "precedes_punct\thas_nonalpha\tprev_fixated\n";
  for (const auto &r : records) {
    out << r.subject << '\t' << r.text_id << '\t' << r.word_index << '\t' << r.word << '\t'
        << (r.gaze_ms ? FormatReal(*r.gaze_ms, "%.6f") : std::string("NA")) << '\t'
        << r.line_first << '\t' << r.line_last << '\t' << r.precedes_punct << '\t'
        << r.has_nonalpha << '\t' << r.prev_fixated << '\n';
  }
}

DisplayTokens SplitDisplayWord(const std::string &word) {
  DisplayTokens out;
  std::size_t b = 0, e = word.size();
  while (b < e && IsPunct(word[b])) ++b;
  while (e > b && IsPunct(word[e - 1])) --e;
  for (std::size_t i = 0; i < b; ++i) out.tokens.emplace_back(1, word[i]);
  if (e > b) {
    std::string core = word.substr(b, e - b);
    for (char &c : core) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    out.core = static_cast<int>(out.tokens.size());
    out.tokens.push_back(std::move(core));
  }
  for (std::size_t i = std::max(e, b); i < word.size(); ++i) {
    out.tokens.emplace_back(1, word[i]);
  }
  return out;
}

TextIndex TextIndex::FromRecords(const std::vector<FixationRecord> &records) {
  TextIndex index;
  for (const auto &r : records) {
    index.Add(r.text_id, r.word_index,
              {r.word, r.line_first, r.line_last, r.precedes_punct, r.has_nonalpha});
  }
  return index;
}

void TextIndex::Add(const std::string &text_id, long word_index, const TextWord &word) {
  auto [it, inserted] = texts_[text_id].emplace(word_index, word);
  if (inserted) return;
  const TextWord &old = it->second;
  if (old.word != word.word || old.line_first != word.line_first ||
      old.line_last != word.line_last || old.precedes_punct != word.precedes_punct ||
      old.has_nonalpha != word.has_nonalpha) {
    throw AlignmentError(Position(text_id, word_index) + ": records disagree ('" +
                         old.word + "' vs '" + word.word + "')");
  }
}

const TextWord *TextIndex::Find(const std::string &text_id, long word_index) const {
  auto t = texts_.find(text_id);
  if (t == texts_.end()) return nullptr;
  auto w = t->second.find(word_index);
  return w == t->second.end() ? nullptr : &w->second;
}

const char *ExclusionReasonName(ExclusionReason r) {
  switch (r) {
    case ExclusionReason::kMissingGaze: return "missing_gaze";
    case ExclusionReason::kPrecedesPunct: return "precedes_punct";
    case ExclusionReason::kHasNonalpha: return "has_nonalpha";
    case ExclusionReason::kLineBoundary: return "line_boundary";
    case ExclusionReason::kOov: return "oov";
    case ExclusionReason::kPrevUninformative: return "prev_uninformative";
  }
  return "?";
}

void ExclusionReport::WriteTsv(std::ostream &out) const {
  out << "reason\tcount\n";
  out << "input\t" << input << "\n";
  for (int i = 0; i < kExclusionReasonCount; ++i) {
    out << ExclusionReasonName(static_cast<ExclusionReason>(i)) << '\t' << counts[i] << '\n';
  }
  out << "retained\t" << output << "\n";
}

std::vector<ExclusionReason> ExclusionReasons(const FixationRecord &rec,
                                              const TextIndex &index,
                                              const Vocabulary &vocab) {
  std::vector<ExclusionReason> why;
  if (!rec.gaze_ms) why.push_back(ExclusionReason::kMissingGaze);
  if (rec.precedes_punct) why.push_back(ExclusionReason::kPrecedesPunct);
  if (rec.has_nonalpha) why.push_back(ExclusionReason::kHasNonalpha);
  if (rec.line_first || rec.line_last) why.push_back(ExclusionReason::kLineBoundary);
  if (IsOov(rec.word, vocab)) why.push_back(ExclusionReason::kOov);
  const TextWord *prev = index.Find(rec.text_id, rec.word_index - 1);
  if (prev == nullptr || prev->precedes_punct || prev->has_nonalpha ||
      IsOov(prev->word, vocab)) {
    why.push_back(ExclusionReason::kPrevUninformative);
  }
  return why;
}

std::vector<FixationRecord> ApplyExclusions(const std::vector<FixationRecord> &records,
                                            const Vocabulary &vocab,
                                            const TextIndex &index,
                                            ExclusionReport *report) {
  std::vector<FixationRecord> kept;
  ExclusionReport local;
  local.input = records.size();
  for (const auto &r : records) {
    const auto why = ExclusionReasons(r, index, vocab);
    for (ExclusionReason reason : why) ++local.counts[static_cast<int>(reason)];
    if (why.empty()) kept.push_back(r);
  }
  local.output = kept.size();
  if (report) *report = local;
  return kept;
}

std::vector<FixationRecord> ApplyExclusions(const std::vector<FixationRecord> &records,
                                            const Vocabulary &vocab,
                                            ExclusionReport *report) {
  return ApplyExclusions(records, vocab, TextIndex::FromRecords(records), report);
}

const std::vector<double> &RegressionDataset::Column(const std::string &name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return columns[i];
  }
  throw LookupError("no design column '" + name + "'");
}

bool RegressionDataset::HasColumn(const std::string &name) const {
  return std::find(names.begin(), names.end(), name) != names.end();
}

void RegressionDataset::WriteTsv(std::ostream &out) const {
  out << "# local_order\t" << local_order << '\n';
  for (const auto &[name, mean] : centering_means) {
    out << "# mean\t" << name << '\t' << FormatReal(mean, "%.17g") << '\n';
  }
  out << "subject\ttext_id\tword_index\tgaze_ms";
  for (const auto &n : names) out << '\t' << n;
  out << '\n';
  for (std::size_t i = 0; i < rows(); ++i) {
    out << subjects[i] << '\t' << text_ids[i] << '\t' << word_indices[i] << '\t'
        << FormatReal(response[i], "%.17g");
    for (const auto &c : columns) out << '\t' << FormatReal(c[i], "%.17g");
    out << '\n';
  }
}

RegressionDataset RegressionDataset::ReadTsv(std::istream &in, const std::string &source) {
  RegressionDataset d;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = SplitTabs(line);
    if (line[0] == '#') {
      if (f.size() == 2 && f[0] == "# local_order") {
        if (!ParseNumber(f[1], &d.local_order)) {
          throw ParseError(source, lineno, "bad local_order");
        }
      } else if (f.size() == 3 && f[0] == "# mean") {
        double m = 0;
        if (!ParseNumber(f[2], &m)) throw ParseError(source, lineno, "bad mean");
        d.centering_means[f[1]] = m;
      }
      continue;
    }
    if (!header) {
      if (f.size() < 4 || f[0] != "subject" || f[3] != "gaze_ms") {
        throw ParseError(source, lineno, "bad design header");
      }
      d.names.assign(f.begin() + 4, f.end());
      d.columns.resize(d.names.size());
      header = true;
      continue;
    }
    if (f.size() != d.names.size() + 4) {
      throw ParseError(source, lineno, "expected " + std::to_string(d.names.size() + 4) +
                                           " columns");
    }
    long idx = 0;
    double y = 0;
    if (!ParseNumber(f[2], &idx) || !ParseNumber(f[3], &y)) {
      throw ParseError(source, lineno, "bad word_index or gaze_ms");
    }
    d.subjects.push_back(f[0]);
    d.text_ids.push_back(f[1]);
    d.word_indices.push_back(idx);
    d.response.push_back(y);
    for (std::size_t j = 0; j < d.names.size(); ++j) {
      double v = 0;
      if (!ParseNumber(f[4 + j], &v)) {
        throw ParseError(source, lineno, "bad value for '" + d.names[j] + "'");
      }
      d.columns[j].push_back(v);
    }
  }
  if (!header) throw ParseError(source, lineno, "missing design header");
  return d;
}

std::string LocalStatName(int local_order) {
  switch (local_order) {
    case 1: return "unigram";
    case 2: return "bigram";
    case 3: return "trigram";
  }
  throw Error("local order must be 1, 2 or 3, got " + std::to_string(local_order));
}

std::vector<std::string> LocalColumns(int local_order) {
  const std::string stem = local_order == 1 ? "logfreq" : LocalStatName(local_order);
  return {stem + "_n", stem + "_prev"};
}

TokenStream TextStream(const TextIndex &index, const Vocabulary &vocab) {
  return BuildLayout(index, vocab).stream;
}

RegressionDataset BuildDesign(const std::vector<FixationRecord> &records,
                              const TextIndex &index, const DesignModels &models,
                              int local_order) {
  LocalStatName(local_order);
  if (models.unigram == nullptr) throw Error("design needs a unigram model");
  if (models.base == nullptr && models.series == nullptr) {
    throw Error("design needs a base model or a log-probability series");
  }
  if (local_order > 1 && models.local == nullptr) {
    throw Error("design needs a local model of order " + std::to_string(local_order));
  }
  const Vocabulary &vocab = models.unigram->vocab();
  if ((models.base && !(models.base->vocab() == vocab)) ||
      (models.local && !(models.local->vocab() == vocab))) {
    throw Error("design models must share one vocabulary");
  }

  const TextLayout layout = BuildLayout(index, vocab);
  if (models.series && models.series->sentence_count() != layout.stream.sentences.size()) {
    throw AlignmentError("series has " + std::to_string(models.series->sentence_count()) +
                         " sentences, the fixation texts have " +
                         std::to_string(layout.stream.sentences.size()));
  }
  if (models.series) models.series->CheckAlignment(layout.stream, vocab);

  struct WordStats {
    double surprisal, logfreq, local, loglen;
  };
  std::map<std::pair<std::string, long>, WordStats> memo;
  auto stats = [&](const std::string &text_id, long word_index) -> const WordStats & {
    const auto key = std::make_pair(text_id, word_index);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    auto w = layout.where.find(key);
    if (w == layout.where.end()) {
      throw AlignmentError(Position(text_id, word_index) + ": not in the text index");
    }
    const auto [s, t] = w->second;
    const auto &ids = layout.stream.sentences[s];
    const std::span<const WordId> ctx(ids.data(), t);
    WordStats ws{};
    if (models.series) {
      const TokenLogProbSeries &series = *models.series;
      const auto sent = series.Sentence(s);
      if (t - 1 >= sent.size()) {
        throw AlignmentError(Position(text_id, word_index) + ": series sentence " +
                             std::to_string(s) + " has no token " + std::to_string(t - 1));
      }
      const TokenLogProb &rec = sent[t - 1];
      const auto rec_tokens = Tokenize(rec.word);
      const WordId rec_id = rec_tokens.size() == 1 ? TokenId(rec_tokens[0], vocab) : kUnkId;
      if (rec_id != ids[t]) {
        throw AlignmentError(Position(text_id, word_index) + ": series word '" + rec.word +
                             "' does not match text token '" + layout.tokens[s][t] + "'");
      }
      ws.surprisal = rec.logprob;
    } else {
      ws.surprisal = models.base->LogProb(ids[t], ctx);
    }
    ws.logfreq = models.unigram->LogProb(ids[t], ctx);
    ws.local = local_order > 1 ? models.local->LogProb(ids[t], ctx) : 0.0;
    const DisplayTokens dt = SplitDisplayWord(index.Find(text_id, word_index)->word);
    const std::size_t len = dt.core >= 0 ? dt.tokens[dt.core].size() : 1;
    ws.loglen = std::log(static_cast<double>(len));
    return memo.emplace(key, ws).first->second;
  };

  RegressionDataset d;
  d.local_order = local_order;
  const auto local_cols = LocalColumns(local_order);
  d.names = {"surprisal_n", "surprisal_prev", "logfreq_n", "logfreq_prev"};
  if (local_order > 1) d.names.insert(d.names.end(), local_cols.begin(), local_cols.end());
  for (const char *n : {"loglen_n", "loglen_prev", "freq_x_len_n", "freq_x_len_prev",
                        "prev_fixated", "word_number"}) {
    d.names.emplace_back(n);
  }
  d.columns.assign(d.names.size(), {});
  std::map<std::string, std::vector<double> *> col;
  for (std::size_t i = 0; i < d.names.size(); ++i) col[d.names[i]] = &d.columns[i];

  for (const auto &r : records) {
    if (!r.gaze_ms) {
      throw Error(Position(r.text_id, r.word_index) + ": record without gaze in the design");
    }
    const WordStats cur = stats(r.text_id, r.word_index);
    if (index.Find(r.text_id, r.word_index - 1) == nullptr) {
      throw AlignmentError(Position(r.text_id, r.word_index) + ": no previous word");
    }
    const WordStats prev = stats(r.text_id, r.word_index - 1);
    col["surprisal_n"]->push_back(cur.surprisal);
    col["surprisal_prev"]->push_back(prev.surprisal);
    col["logfreq_n"]->push_back(cur.logfreq);
    col["logfreq_prev"]->push_back(prev.logfreq);
    if (local_order > 1) {
      col[local_cols[0]]->push_back(cur.local);
      col[local_cols[1]]->push_back(prev.local);
    }
    col["loglen_n"]->push_back(cur.loglen);
    col["loglen_prev"]->push_back(prev.loglen);
    col["prev_fixated"]->push_back(r.prev_fixated ? 1.0 : 0.0);
    col["word_number"]->push_back(static_cast<double>(r.word_index));
    d.response.push_back(*r.gaze_ms);
    d.subjects.push_back(r.subject);
    d.text_ids.push_back(r.text_id);
    d.word_indices.push_back(r.word_index);
  }

  std::vector<std::string> centered = {"surprisal_n", "surprisal_prev", "logfreq_n",
                                       "logfreq_prev", "loglen_n", "loglen_prev"};
  if (local_order > 1) centered.insert(centered.end(), local_cols.begin(), local_cols.end());
  const std::size_t n = d.rows();
  for (const auto &name : centered) {
    auto &c = *col[name];
    CompensatedSum sum;
    for (double v : c) sum.Add(v);
    const double mean = n ? sum.Value() / static_cast<double>(n) : 0.0;
    for (double &v : c) v -= mean;
    d.centering_means[name] = mean;
  }
  for (const char *suffix : {"_n", "_prev"}) {
    const auto &f = *col[std::string("logfreq") + suffix];
    const auto &l = *col[std::string("loglen") + suffix];
    auto &out = *col[std::string("freq_x_len") + suffix];
    for (std::size_t i = 0; i < n; ++i) out.push_back(f[i] * l[i]);
  }
  return d;
}

std::map<std::string, double> DefaultSyntheticCoefficients(int local_order) {
  std::map<std::string, double> c = {
      {"surprisal_n", -3.0},   {"surprisal_prev", -1.0}, {"logfreq_n", -4.0},
      {"logfreq_prev", -2.0},  {"freq_x_len_n", 1.5},    {"freq_x_len_prev", 0.8},
      {"prev_fixated", -15.0}, {"word_number", 0.01},
  };
  if (local_order > 1) {
    const auto cols = LocalColumns(local_order);
    c[cols[0]] = -1.5;
    c[cols[1]] = 0.0;
  }
  return c;
}

namespace {

bool AllPunct(const std::string &token) {
  return !token.empty() && std::all_of(token.begin(), token.end(), IsPunct);
}

bool Opens(const std::string &token) {
  return token == "(" || token == "[" || token == "{";
}

TextWord MakeTextWord(std::string word) {
  TextWord w;
  std::size_t e = word.size();
  while (e > 0 && IsPunct(word[e - 1])) --e;
  w.precedes_punct = e < word.size();
  w.has_nonalpha = e == 0 || !std::all_of(word.begin(), word.begin() + e, IsAlpha);
  w.word = std::move(word);
  return w;
}

// Display words of each text, punctuation glued to its neighbour.
std::vector<std::vector<std::string>> DisplayTexts(
    const std::vector<std::vector<std::string>> &lines, int sentences_per_text) {
  std::vector<std::vector<std::string>> texts;
  std::vector<std::string> cur;
  std::string pending;
  int sentences = 0;
  auto flush = [&]() {
    if (!pending.empty() && !cur.empty()) cur.back() += pending;
    pending.clear();
    if (!cur.empty()) texts.push_back(std::move(cur));
    cur.clear();
    sentences = 0;
  };
  for (const auto &line : lines) {
    for (const auto &tok : line) {
      if (AllPunct(tok) && !Opens(tok) && !cur.empty() && pending.empty()) {
        cur.back() += tok;
      } else if (AllPunct(tok)) {
        pending += tok;
      } else {
        cur.push_back(pending + tok);
        pending.clear();
      }
    }
    if (++sentences == sentences_per_text) flush();
  }
  flush();
  return texts;
}

std::string SubjectLabel(int s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "s%02d", s + 1);
  return buf;
}

std::string TextLabel(std::size_t t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "t%04zu", t + 1);
  return buf;
}

}  // namespace

SyntheticData GenerateSynthetic(const SyntheticSpec &spec,
                                const std::vector<std::vector<std::string>> &lines,
                                const Vocabulary &vocab, const DesignModels &models) {
  if (spec.n < 1 || spec.subjects < 1) throw Error("synthetic data needs n, subjects >= 1");
  if (!(spec.noise_sd >= 0)) throw Error("noise sd must be non-negative");
  if (!(spec.subject_sd >= 0)) throw Error("subject sd must be non-negative");
  if (spec.words_per_line < 2 || spec.sentences_per_text < 1) {
    throw Error("bad synthetic text layout");
  }
  for (const auto &[name, beta] : spec.coefficients) {
    if (!std::isfinite(beta)) throw Error("coefficient '" + name + "' is not finite");
  }

  const auto texts = DisplayTexts(lines, spec.sentences_per_text);
  TextIndex index;
  for (std::size_t t = 0; t < texts.size(); ++t) {
    const auto &words = texts[t];
    for (std::size_t i = 0; i < words.size(); ++i) {
      TextWord w = MakeTextWord(words[i]);
      const auto col = i % spec.words_per_line;
      w.line_first = col == 0;
      w.line_last = col + 1 == static_cast<std::size_t>(spec.words_per_line) ||
                    i + 1 == words.size();
      index.Add(TextLabel(t), static_cast<long>(i + 1), w);
    }
  }

  std::seed_seq layout_seed{spec.seed, std::uint64_t{1}};
  std::mt19937_64 rng(layout_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SyntheticData out;
  for (int s = 0; s < spec.subjects; ++s) {
    const std::size_t target =
        spec.n / spec.subjects + (static_cast<std::size_t>(s) < spec.n % spec.subjects);
    std::size_t included = 0;
    for (const auto &[text_id, words] : index.texts()) {
      if (included >= target) break;
      bool prev_fixated = false;
      for (const auto &[word_index, w] : words) {
        FixationRecord r;
        r.subject = SubjectLabel(s);
        r.text_id = text_id;
        r.word_index = word_index;
        r.word = w.word;
        if (unit(rng) >= spec.skip_rate) r.gaze_ms = 1.0;
        r.line_first = w.line_first;
        r.line_last = w.line_last;
        r.precedes_punct = w.precedes_punct;
        r.has_nonalpha = w.has_nonalpha;
        r.prev_fixated = prev_fixated;
        prev_fixated = r.gaze_ms.has_value();
        if (ExclusionReasons(r, index, vocab).empty()) ++included;
        out.records.push_back(std::move(r));
        if (included >= target) break;
      }
    }
    if (included < target) {
      throw Error("text too short for " + std::to_string(spec.n) + " synthetic rows");
    }
  }

  std::normal_distribution<double> subject_draw(0.0, spec.subject_sd > 0 ? spec.subject_sd : 1.0);
  out.subject_offsets.resize(spec.subjects);
  double offset_sum = 0.0;
  for (double &o : out.subject_offsets) {
    o = spec.subject_sd > 0 ? subject_draw(rng) : 0.0;
    offset_sum += o;
  }
  for (double &o : out.subject_offsets) o -= offset_sum / spec.subjects;

  const auto kept = ApplyExclusions(out.records, vocab, index);
  out.dataset = BuildDesign(kept, index, models, spec.local_order);
  RegressionDataset &d = out.dataset;
  for (const auto &[name, beta] : spec.coefficients) {
    if (beta != 0.0 && !d.HasColumn(name)) {
      throw Error("planted coefficient for unknown column '" + name + "'");
    }
  }

  std::seed_seq noise_seed{spec.noise_seed.value_or(spec.seed), std::uint64_t{2}};
  std::mt19937_64 noise_rng(noise_seed);
  std::normal_distribution<double> noise(0.0, spec.noise_sd > 0 ? spec.noise_sd : 1.0);
  auto draw = [&](double mean) {
    if (spec.noise_sd == 0) return mean;
    for (;;) {
      const double y = mean + noise(noise_rng);
      if (y > 1.0) return y;
    }
  };

  std::map<std::tuple<std::string, std::string, long>, double> gaze;
  for (std::size_t i = 0; i < d.rows(); ++i) {
    double mean = spec.intercept;
    for (std::size_t j = 0; j < d.names.size(); ++j) {
      auto it = spec.coefficients.find(d.names[j]);
      if (it != spec.coefficients.end()) mean += it->second * d.columns[j][i];
    }
    const int s = std::stoi(d.subjects[i].substr(1)) - 1;
    mean += out.subject_offsets[s];
    d.response[i] = draw(mean);
    gaze[{d.subjects[i], d.text_ids[i], d.word_indices[i]}] = d.response[i];
  }
  for (auto &r : out.records) {
    if (!r.gaze_ms) continue;
    auto it = gaze.find({r.subject, r.text_id, r.word_index});
    r.gaze_ms = it != gaze.end() ? it->second : draw(spec.intercept);
  }
  return out;
}

}  // namespace locallm
