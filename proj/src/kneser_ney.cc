// kneser_ney.cc
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

#include "locallm/kneser_ney.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "locallm/error.h"
#include "locallm/numeric.h"

namespace locallm {

OrderDiscounts OrderDiscounts::FromCountsOfCounts(
    const std::array<std::uint64_t, 4> &n) {
  OrderDiscounts out;
  out.counts_of_counts = n;
  const double n1 = n[0], n2 = n[1], n3 = n[2], n4 = n[3];
  if (n1 == 0 || n2 == 0) return out;
  const double y = n1 / (n1 + 2 * n2);
  const double candidate[3] = {
      1 - 2 * y * n2 / n1,
      n3 > 0 ? 2 - 3 * y * n3 / n2 : -1.0,
      n3 > 0 && n4 > 0 ? 3 - 4 * y * n4 / n3 : -1.0,
  };
  for (int i = 0; i < 3; ++i) {
    if (candidate[i] >= 0 && candidate[i] < i + 1) {
      out.d[i] = candidate[i];
      out.fallback[i] = false;
    }
  }
  return out;
}

KneserNeyLM::KneserNeyLM(std::shared_ptr<const Vocabulary> vocab,
                         std::vector<NGramMap<NGramEntry>> entries,
                         std::vector<OrderDiscounts> discounts)
    : vocab_(std::move(vocab)),
      entries_(std::move(entries)),
      discounts_(std::move(discounts)),
      successors_(entries_.size()),
      unigram_(vocab_->size()) {
  if (entries_.empty() || entries_.size() > static_cast<std::size_t>(kMaxOrder)) {
    throw Error("model order must be in 1.." + std::to_string(kMaxOrder));
  }
  for (WordId w = 1; w < vocab_->size(); ++w) {
    const NGramEntry *e = Find(NGram(std::span<const WordId>(&w, 1)));
    if (e == nullptr) {
      throw Error("model lacks a unigram entry for '" + vocab_->Word(w) + "'");
    }
    unigram_[w] = e->log_prob;
  }
  for (std::size_t j = 2; j <= entries_.size(); ++j) {
    auto &succ = successors_[j - 1];
    for (const auto &entry : entries_[j - 1]) {
      succ[entry.first.Prefix()].push_back(entry.first.back());
    }
    for (auto &kv : succ) std::sort(kv.second.begin(), kv.second.end());
  }
}

const NGramEntry *KneserNeyLM::Find(const NGram &g) const {
  if (g.empty() || g.size() > order()) return nullptr;
  const auto &m = entries_[g.size() - 1];
  auto it = m.find(g);
  return it == m.end() ? nullptr : &it->second;
}

double KneserNeyLM::LogProb(WordId word, std::span<const WordId> context) const {
  word = Clamp(word);
  if (word == kBosId) throw Error("the begin sentinel is never predicted");
  context = TruncateContext(context, order() - 1);
  WordId buf[kMaxOrder];
  const int n = static_cast<int>(context.size());
  for (int i = 0; i < n; ++i) buf[i] = Clamp(context[i]);

  double backoff = 0.0;
  for (int m = n; m >= 1; --m) {
    const NGram ctx(std::span<const WordId>(buf + n - m, m));
    if (const NGramEntry *e = Find(ctx.Append(word))) {
      return backoff + e->log_prob;
    }
    if (const NGramEntry *c = Find(ctx)) backoff += c->log_backoff;
  }
  return backoff + unigram_[word];
}

LogDistribution KneserNeyLM::FullDistribution(
    std::span<const WordId> context) const {
  context = TruncateContext(context, order() - 1);
  WordId buf[kMaxOrder];
  const int n = static_cast<int>(context.size());
  for (int i = 0; i < n; ++i) buf[i] = Clamp(context[i]);

  // Entries are kept relative to a running backoff offset that applies to
  // the whole vocabulary, then the offset is folded in at the end.
  LogDistribution dist = unigram_;
  double offset = 0.0;
  for (int m = 1; m <= n; ++m) {
    const NGram ctx(std::span<const WordId>(buf + n - m, m));
    const NGramEntry *c = Find(ctx);
    if (c == nullptr) break;
    auto it = successors_[m].find(ctx);
    if (it == successors_[m].end()) break;
    offset += c->log_backoff;
    for (WordId w : it->second) {
      dist[w] = Find(ctx.Append(w))->log_prob - offset;
    }
  }
  if (offset != 0.0) {
    for (double &v : dist.values()) v += offset;
  }
  return dist;
}

std::size_t KneserNeyLM::ObservedContextCount(int j) const {
  if (j == 1) return 1;
  return successors_.at(j - 1).size();
}

std::vector<NGram> KneserNeyLM::ObservedContexts(int j) const {
  std::vector<NGram> out;
  if (j == 1) {
    out.emplace_back();
    return out;
  }
  for (const auto &kv : successors_.at(j - 1)) out.push_back(kv.first);
  std::sort(out.begin(), out.end(), [](const NGram &a, const NGram &b) {
    return std::lexicographical_compare(a.ids().begin(), a.ids().end(),
                                        b.ids().begin(), b.ids().end());
  });
  return out;
}

namespace {

struct ContextStats {
  double total = 0.0;
  double mass = 0.0;
};

}  // namespace

KneserNeyLM EstimateKneserNey(const NGramCountTable &counts,
                              std::shared_ptr<const Vocabulary> vocab,
                              std::vector<std::string> *warnings) {
  const int order = counts.order();
  std::vector<NGramMap<NGramEntry>> entries(order);
  std::vector<OrderDiscounts> discounts(order);
  const double uniform = 1.0 / static_cast<double>(vocab->predictable_size());

  for (int j = 1; j <= order; ++j) {
    const auto &raw = counts.counts(j);
    for (const auto &kv : raw) {
      for (WordId w : kv.first.ids()) {
        if (w >= vocab->size()) throw Error("count table id outside vocabulary");
      }
    }

    std::array<std::uint64_t, 4> coc{};
    NGramMap<std::uint64_t> adjusted;
    adjusted.reserve(raw.size());
    for (const auto &kv : raw) {
      const std::uint64_t a = counts.AdjustedCount(kv.first);
      if (a == 0) continue;
      adjusted.emplace(kv.first, a);
      if (a <= 4) ++coc[a - 1];
    }
    OrderDiscounts &disc = discounts[j - 1];
    disc = OrderDiscounts::FromCountsOfCounts(coc);
    if (warnings != nullptr) {
      for (int i = 0; i < 3; ++i) {
        if (!disc.fallback[i]) continue;
        std::ostringstream msg;
        msg << "order " << j << ": degenerate counts-of-counts (" << coc[0]
            << ", " << coc[1] << ", " << coc[2] << ", " << coc[3] << "); D"
            << (i + 1) << (i == 2 ? "+" : "") << " falls back to "
            << OrderDiscounts::kFallbackDiscount;
        warnings->push_back(msg.str());
      }
    }

    NGramMap<ContextStats> stats;
    for (const auto &[g, a] : adjusted) {
      ContextStats &s = stats[g.Prefix()];
      s.total += static_cast<double>(a);
      s.mass += disc.For(a);
    }

    auto &out = entries[j - 1];
    if (j == 1) {
      const ContextStats s = stats[NGram()];
      for (WordId w = 1; w < vocab->size(); ++w) {
        const NGram g(std::span<const WordId>(&w, 1));
        auto it = adjusted.find(g);
        const double a = it == adjusted.end() ? 0.0 : static_cast<double>(it->second);
        const double own = a > 0 ? std::max(a - disc.For(it->second), 0.0) : 0.0;
        out[g].log_prob = std::log((own + s.mass * uniform) / s.total);
      }
      const WordId bos = kBosId;
      out[NGram(std::span<const WordId>(&bos, 1))].log_prob = kBosLog10Prob * kLn10;
    } else {
      auto &lower = entries[j - 2];
      out.reserve(adjusted.size());
      for (const auto &[g, a] : adjusted) {
        const ContextStats &s = stats.at(g.Prefix());
        const double p_lower = std::exp(lower.at(g.Suffix()).log_prob);
        const double own = std::max(static_cast<double>(a) - disc.For(a), 0.0);
        out[g].log_prob = std::log((own + s.mass * p_lower) / s.total);
      }
      for (const auto &[ctx, s] : stats) {
        lower.at(ctx).log_backoff = std::log(s.mass / s.total);
      }
    }
  }
  return KneserNeyLM(std::move(vocab), std::move(entries), std::move(discounts));
}

KneserNeyLM TrainKneserNey(const TokenStream &stream,
                           std::shared_ptr<const Vocabulary> vocab, int order,
                           std::vector<std::string> *warnings) {
  return EstimateKneserNey(CountNGrams(stream, order), std::move(vocab), warnings);
}

}  // namespace locallm
