// evaluation.h
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
// Perplexity and interpolation-weight sweeps.
//
// Perplexity is exp(-(1/N) sum_i log p(w_i | h_i)) where the sum runs over
// every predicted token: all words plus one </s> per sentence, never <s>.

#ifndef LOCALLM_EVALUATION_H_
#define LOCALLM_EVALUATION_H_

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "locallm/corpus.h"
#include "locallm/external_lm.h"
#include "locallm/interpolation.h"
#include "locallm/language_model.h"

namespace locallm {

// Per-token log-probabilities in stream order. Throws Error naming the
// sentence, position and word of the first non-finite value.
std::vector<double> TokenLogProbs(const LanguageModel &lm, const TokenStream &eval);

// exp(-mean(log_probs)) with compensated summation in the given order.
double PerplexityFromLogProbs(std::span<const double> log_probs);

double Perplexity(const LanguageModel &lm, const TokenStream &eval);
double Perplexity(const InterpolationSpec &spec, const TokenStream &eval);
double Perplexity(const TokenLogProbSeries &series);

// Mean of -log p over the predicted tokens, in nats.
double MeanSurprisal(const LanguageModel &lm, const TokenStream &eval);

struct SweepPoint {
  double gamma = 0.0;
  double perplexity = 0.0;
};

struct SweepResult {
  InterpolationMode mode = InterpolationMode::kMultiplicative;
  std::vector<SweepPoint> grid;
  std::size_t best_index = 0;
  double best_gamma = 0.0;
  double best_perplexity = 0.0;
  // Perplexities at gamma = 0 (base alone) and gamma = 1 (local alone).
  double base_perplexity = 0.0;
  double local_perplexity = 0.0;

  // Interior grid points strictly lower than both neighbours, plus an
  // endpoint strictly lower than its only neighbour.
  std::size_t LocalMinimumCount() const;
};

// Evaluates every gamma in {0, step, 2 step, .., 1}; 1 / step must be an
// integer. Per-token values are computed with the same kernels as
// InterpolatedLM, so Perplexity() of an InterpolatedLM at a grid gamma
// reproduces the grid value.
SweepResult Sweep(const LanguageModel &base, const LanguageModel &local,
                  InterpolationMode mode, const TokenStream &eval,
                  double step = 0.01);

// CSV `gamma,perplexity` with a header row and six decimals.
void WriteSweepCsv(const SweepResult &result, std::ostream &out);
void WriteSweepCsvFile(const SweepResult &result, const std::string &path);
std::vector<SweepPoint> ReadSweepCsv(std::istream &in, const std::string &source);

}  // namespace locallm

#endif  // LOCALLM_EVALUATION_H_
