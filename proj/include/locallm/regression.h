// regression.h
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
// Gaussian linear regression with subject effects as effect-coded
// (sum-to-zero) dummies, and likelihood-ratio tests between nested fits.

#ifndef LOCALLM_REGRESSION_H_
#define LOCALLM_REGRESSION_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "locallm/reading_time.h"

namespace locallm {

enum class SubjectEffects { kNone, kIntercepts, kInterceptsAndSlopes };

// "none", "intercepts", "slopes".
SubjectEffects ParseSubjectEffects(const std::string &name);
std::string SubjectEffectsName(SubjectEffects e);

struct CoefficientTable {
  // Column labels: "(intercept)", the predictors, then "subject[<id>]" and
  // "<predictor>:subject[<id>]" terms.
  std::vector<std::string> names;
  std::vector<double> beta;
  std::vector<double> se;
  // Drop-one LRT p-value per coefficient; NaN where none was computed.
  std::vector<double> p_value;
  double log_likelihood = 0.0;
  double rss = 0.0;
  std::size_t n = 0;
  std::size_t p = 0;
  // Fingerprint of the response vector, used to check that two fits share
  // their rows.
  std::uint64_t rows_fingerprint = 0;

  // Throws LookupError for an unknown name.
  std::size_t Index(const std::string &name) const;
  double Beta(const std::string &name) const { return beta[Index(name)]; }

  // TSV `predictor<TAB>beta<TAB>se<TAB>p_value` preceded by `#` lines
  // carrying log_likelihood, rss, n, p and the fingerprint.
  void WriteTsv(std::ostream &out) const;
  static CoefficientTable ReadTsv(std::istream &in, const std::string &source);
};

struct FitOptions {
  SubjectEffects subject_effects = SubjectEffects::kIntercepts;
  // Predictors that get per-subject slopes under kInterceptsAndSlopes.
  std::vector<std::string> slope_predictors;
};

// Least squares through a column-pivoted Householder QR. The variance
// behind the log-likelihood is the ML estimate RSS / n; standard errors use
// RSS / (n - p). Throws Error naming the offending columns when the design
// is rank deficient, and when n <= p.
CoefficientTable FitLinear(const RegressionDataset &data,
                           const std::vector<std::string> &predictors,
                           const FitOptions &options = {});

struct LrtResult {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
};

// 2 (l_full - l_reduced), clamped at 0, against chi-square with the
// parameter-count difference. Throws Error unless `reduced`'s terms are a
// subset of `full`'s and both were fitted to the same rows. Identical term
// sets give statistic 0, df 0 and p 1.
LrtResult Lrt(const CoefficientTable &full, const CoefficientTable &reduced);

// Upper tail of the chi-square distribution, Q(df / 2, x / 2). Throws
// Error for x < 0 or df < 1.
double ChiSquareSf(double x, int df);

// Fits `predictors` and fills p_value for each of them by refitting
// without that predictor (and its subject slopes).
CoefficientTable FitWithDropOneTests(const RegressionDataset &data,
                                     const std::vector<std::string> &predictors,
                                     const FitOptions &options = {});

// The fixed predictors of the linearized mixed model with local statistics
// of `local_order`; order 1 is the unigram baseline.
std::vector<std::string> ModelPredictors(int local_order);

}  // namespace locallm

#endif  // LOCALLM_REGRESSION_H_
