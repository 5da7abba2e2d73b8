// analysis.h
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
// Effective interpolation weights implied by regression coefficients,
// their perplexity cost, and rank correlation.

#ifndef LOCALLM_ANALYSIS_H_
#define LOCALLM_ANALYSIS_H_

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "locallm/corpus.h"
#include "locallm/language_model.h"

namespace locallm {

struct EffectiveWeight {
  double weight = 0.0;
  // False when the coefficients have opposite signs and the weight falls
  // outside [0, 1].
  bool interpretable = true;
};

// beta_ngram / (beta_surprisal + beta_ngram). Throws Error when the
// denominator is zero.
EffectiveWeight ComputeEffectiveWeight(double beta_ngram, double beta_surprisal);

// Perplexity on `eval` of the multiplicative interpolation with the local
// model weighted by `weight`. Throws Error for a weight outside [0, 1].
double WeightToPerplexity(double weight, const LanguageModel &base,
                          const LanguageModel &local, const TokenStream &eval);

// Spearman rank correlation with average ranks for ties. Throws Error for
// unequal lengths, fewer than two values or a constant input.
double SpearmanRho(std::span<const double> x, std::span<const double> y);

struct ReportRow {
  std::string predictor;
  double beta_ngram = 0.0;
  double beta_surprisal = 0.0;
  double p_value = 0.0;
  EffectiveWeight effective;
  double optimal_weight = 0.0;
  // NaN when the effective weight is not interpretable.
  double effective_ppl = 0.0;
  double optimal_ppl = 0.0;
};

// TSV with header `predictor  beta_ngram  beta_surprisal  p_value
// effective_weight  optimal_weight  effective_ppl  optimal_ppl`. Values
// that are not available are written as NA.
void WriteReport(const std::vector<ReportRow> &rows, std::ostream &out);
std::vector<ReportRow> ReadReport(std::istream &in, const std::string &source);

}  // namespace locallm

#endif  // LOCALLM_ANALYSIS_H_
