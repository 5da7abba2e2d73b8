// analysis.cc
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

#include "locallm/analysis.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <memory>
#include <numeric>
#include <ostream>

#include "locallm/error.h"
#include "locallm/evaluation.h"
#include "locallm/interpolation.h"

namespace locallm {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> AverageRanks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

std::string Format(double x) {
  if (std::isnan(x)) return "NA";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", x);
  return buf;
}

bool ParseValue(const std::string &s, double *out) {
  if (s == "NA") {
    *out = kNaN;
    return true;
  }
  const char *end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, *out);
  return ec == std::errc() && ptr == end && !s.empty();
}

}  // namespace

EffectiveWeight ComputeEffectiveWeight(double beta_ngram, double beta_surprisal) {
  const double denom = beta_surprisal + beta_ngram;
  if (denom == 0.0) {
    throw Error("effective weight undefined: coefficients sum to zero");
  }
  EffectiveWeight w;
  w.weight = beta_ngram / denom;
  w.interpretable = w.weight >= 0.0 && w.weight <= 1.0;
  return w;
}

double WeightToPerplexity(double weight, const LanguageModel &base,
                          const LanguageModel &local, const TokenStream &eval) {
  if (!(weight >= 0.0 && weight <= 1.0)) {
    throw Error("interpolation weight must lie in [0, 1]");
  }
  InterpolationSpec spec;
  spec.mode = InterpolationMode::kMultiplicative;
  spec.gamma = weight;
  spec.base = std::shared_ptr<const LanguageModel>(&base, [](const LanguageModel *) {});
  spec.local = std::shared_ptr<const LanguageModel>(&local, [](const LanguageModel *) {});
  return Perplexity(spec, eval);
}

double SpearmanRho(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("rank correlation needs equal lengths");
  if (x.size() < 2) throw Error("rank correlation needs at least two values");
  const auto rx = AverageRanks(x), ry = AverageRanks(y);
  const double n = static_cast<double>(x.size());
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  if (sxx == 0.0 || syy == 0.0) throw Error("rank correlation of a constant vector");
  return sxy / std::sqrt(sxx * syy);
}

void WriteReport(const std::vector<ReportRow> &rows, std::ostream &out) {
  out << "predictor\tbeta_ngram\tbeta_surprisal\tp_value\teffective_weight\t"
         "optimal_weight\teffective_ppl\toptimal_ppl\n";
  for (const auto &r : rows) {
    out << r.predictor << '\t' << Format(r.beta_ngram) << '\t' << Format(r.beta_surprisal)
        << '\t';
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", r.p_value);
    out << (std::isnan(r.p_value) ? "NA" : buf) << '\t' << Format(r.effective.weight)
        << '\t' << Format(r.optimal_weight) << '\t' << Format(r.effective_ppl) << '\t'
        << Format(r.optimal_ppl) << '\n';
  }
}

std::vector<ReportRow> ReadReport(std::istream &in, const std::string &source) {
  std::vector<ReportRow> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      if (line.rfind("predictor\tbeta_ngram", 0) != 0) {
        throw ParseError(source, lineno, "bad report header");
      }
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    for (;;) {
      const auto tab = line.find('\t', start);
      f.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (f.size() != 8) throw ParseError(source, lineno, "expected 8 columns");
    ReportRow r;
    r.predictor = f[0];
    double *dst[] = {&r.beta_ngram,     &r.beta_surprisal, &r.p_value,     &r.effective.weight,
                     &r.optimal_weight, &r.effective_ppl,  &r.optimal_ppl};
    for (int i = 0; i < 7; ++i) {
      if (!ParseValue(f[1 + i], dst[i])) throw ParseError(source, lineno, "bad number");
    }
    r.effective.interpretable = r.effective.weight >= 0.0 && r.effective.weight <= 1.0;
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace locallm
