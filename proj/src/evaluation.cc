// evaluation.cc
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

#include "locallm/evaluation.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "locallm/error.h"
#include "locallm/ngram.h"
#include "locallm/numeric.h"

namespace locallm {
namespace {

void CheckFinite(double lp, const TokenStream &eval, std::size_t s, std::size_t t,
                 const Vocabulary &vocab) {
  if (!std::isfinite(lp)) {
    throw Error("non-finite log-probability at sentence " + std::to_string(s) +
                ", token " + std::to_string(t - 1) + " ('" +
                vocab.Word(eval.sentences[s][t]) + "')");
  }
}

std::size_t GridSize(double step) {
  if (!(step > 0.0 && step <= 1.0)) throw Error("gamma step must lie in (0, 1]");
  const double intervals = std::round(1.0 / step);
  if (std::fabs(intervals * step - 1.0) > 1e-9) {
    throw Error("1 / gamma step must be an integer");
  }
  return static_cast<std::size_t>(intervals) + 1;
}

}  // namespace

std::vector<double> TokenLogProbs(const LanguageModel &lm, const TokenStream &eval) {
  std::vector<double> out;
  out.reserve(eval.PredictedTokenCount());
  for (std::size_t s = 0; s < eval.sentences.size(); ++s) {
    const auto &ids = eval.sentences[s];
    for (std::size_t t = 1; t < ids.size(); ++t) {
      const double lp = lm.LogProb(ids[t], std::span<const WordId>(ids.data(), t));
      CheckFinite(lp, eval, s, t, lm.vocab());
      out.push_back(lp);
    }
  }
  return out;
}

double PerplexityFromLogProbs(std::span<const double> log_probs) {
  if (log_probs.empty()) throw Error("perplexity of an empty evaluation set");
  CompensatedSum sum;
  for (double lp : log_probs) {
    if (!std::isfinite(lp)) throw Error("non-finite log-probability");
    sum.Add(lp);
  }
  return std::exp(-sum.Value() / static_cast<double>(log_probs.size()));
}

double Perplexity(const LanguageModel &lm, const TokenStream &eval) {
  return PerplexityFromLogProbs(TokenLogProbs(lm, eval));
}

double Perplexity(const InterpolationSpec &spec, const TokenStream &eval) {
  return Perplexity(InterpolatedLM(spec), eval);
}

double Perplexity(const TokenLogProbSeries &series) {
  std::vector<double> lps;
  lps.reserve(series.records().size());
  for (const auto &r : series.records()) lps.push_back(r.logprob);
  return PerplexityFromLogProbs(lps);
}

double MeanSurprisal(const LanguageModel &lm, const TokenStream &eval) {
  const auto lps = TokenLogProbs(lm, eval);
  if (lps.empty()) throw Error("mean surprisal of an empty evaluation set");
  CompensatedSum sum;
  for (double lp : lps) sum.Add(-lp);
  return sum.Value() / static_cast<double>(lps.size());
}

std::size_t SweepResult::LocalMinimumCount() const {
  const std::size_t n = grid.size();
  if (n == 1) return 1;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = grid[i].perplexity;
    const bool left = i == 0 || v < grid[i - 1].perplexity;
    const bool right = i + 1 == n || v < grid[i + 1].perplexity;
    if (left && right) ++count;
  }
  return count;
}

SweepResult Sweep(const LanguageModel &base, const LanguageModel &local,
                  InterpolationMode mode, const TokenStream &eval, double step) {
  if (!(base.vocab() == local.vocab())) {
    throw Error("interpolated models must share one vocabulary");
  }
  if (mode == InterpolationMode::kMultiplicative &&
      (!base.HasFullDistribution() || !local.HasFullDistribution())) {
    throw CapabilityError(
        "multiplicative interpolation needs full distributions from both models");
  }
  const std::size_t points = GridSize(step);
  std::vector<double> gammas(points);
  for (std::size_t g = 0; g < points; ++g) {
    gammas[g] = static_cast<double>(g) / static_cast<double>(points - 1);
  }

  std::vector<CompensatedSum> sums(points);
  std::size_t n = 0;
  const int context_length = std::max(base.ContextLength(), local.ContextLength());
  NGramMap<std::vector<double>> normalizers;
  std::vector<double> z(points);
  for (std::size_t s = 0; s < eval.sentences.size(); ++s) {
    const auto &ids = eval.sentences[s];
    for (std::size_t t = 1; t < ids.size(); ++t) {
      const auto context = std::span<const WordId>(ids.data(), t);
      const double lb = base.LogProb(ids[t], context);
      const double ll = local.LogProb(ids[t], context);
      CheckFinite(lb, eval, s, t, base.vocab());
      CheckFinite(ll, eval, s, t, local.vocab());
      if (mode == InterpolationMode::kAdditive) {
        for (std::size_t g = 0; g < points; ++g) {
          sums[g].Add(MixAdditive(ll, lb, gammas[g]));
        }
      } else {
        const auto trunc = TruncateContext(context, context_length);
        const bool cacheable = trunc.size() <= static_cast<std::size_t>(kMaxOrder);
        const std::vector<double> *cached = nullptr;
        if (cacheable) {
          auto it = normalizers.find(NGram(trunc));
          if (it != normalizers.end()) cached = &it->second;
        }
        if (cached == nullptr) {
          const LogDistribution dl = local.FullDistribution(trunc);
          const LogDistribution db = base.FullDistribution(trunc);
          for (std::size_t g = 0; g < points; ++g) {
            z[g] = MultiplicativeLogNormalizer(dl.values(), db.values(), gammas[g]);
          }
          if (cacheable) cached = &normalizers.emplace(NGram(trunc), z).first->second;
        }
        const std::vector<double> &zs = cached ? *cached : z;
        for (std::size_t g = 0; g < points; ++g) {
          sums[g].Add(MixMultiplicative(ll, lb, gammas[g]) - zs[g]);
        }
      }
      ++n;
    }
  }
  if (n == 0) throw Error("perplexity of an empty evaluation set");

  SweepResult result;
  result.mode = mode;
  result.grid.resize(points);
  for (std::size_t g = 0; g < points; ++g) {
    result.grid[g] = {gammas[g],
                      std::exp(-sums[g].Value() / static_cast<double>(n))};
    if (result.grid[g].perplexity < result.grid[result.best_index].perplexity) {
      result.best_index = g;
    }
  }
  result.best_gamma = result.grid[result.best_index].gamma;
  result.best_perplexity = result.grid[result.best_index].perplexity;
  result.base_perplexity = result.grid.front().perplexity;
  result.local_perplexity = result.grid.back().perplexity;
  return result;
}

void WriteSweepCsv(const SweepResult &result, std::ostream &out) {
  out << "gamma,perplexity\n";
  char buf[64];
  for (const auto &p : result.grid) {
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f\n", p.gamma, p.perplexity);
    out << buf;
  }
}

void WriteSweepCsvFile(const SweepResult &result, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  WriteSweepCsv(result, out);
  out.flush();
  if (!out) throw Error("write failed for '" + path + "'");
}

std::vector<SweepPoint> ReadSweepCsv(std::istream &in, const std::string &source) {
  std::vector<SweepPoint> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      if (line != "gamma,perplexity") throw ParseError(source, lineno, "bad header");
      continue;
    }
    if (line.empty()) continue;
    const auto comma = line.find(',');
    SweepPoint p;
    const char *b = line.data(), *e = line.data() + line.size();
    if (comma == std::string::npos ||
        std::from_chars(b, b + comma, p.gamma).ptr != b + comma ||
        std::from_chars(b + comma + 1, e, p.perplexity).ptr != e) {
      throw ParseError(source, lineno, "expected gamma,perplexity");
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace locallm
