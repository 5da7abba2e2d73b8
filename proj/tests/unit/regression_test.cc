// regression_test.cc
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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "locallm/error.h"
#include "locallm/regression.h"

namespace locallm {
namespace {

RegressionDataset Make(const std::vector<std::string> &names,
                       const std::vector<std::vector<double>> &columns,
                       const std::vector<double> &y,
                       std::vector<std::string> subjects = {}) {
  RegressionDataset d;
  d.names = names;
  d.columns = columns;
  d.response = y;
  if (subjects.empty()) subjects.assign(y.size(), "s1");
  d.subjects = std::move(subjects);
  d.text_ids.assign(y.size(), "t");
  for (std::size_t i = 0; i < y.size(); ++i) d.word_indices.push_back(static_cast<long>(i + 1));
  return d;
}

const FitOptions kNoSubjects{SubjectEffects::kNone, {}};

RegressionDataset Noisy(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> x1(n), x2(n), x3(n), y(n);
  std::vector<std::string> subj(n);
  for (std::size_t i = 0; i < n; ++i) {
    x1[i] = z(rng);
    x2[i] = z(rng) + 0.5 * x1[i];
    x3[i] = z(rng);
    subj[i] = "s" + std::to_string(i % 4);
    y[i] = 3.0 + 2.0 * x1[i] - 1.0 * x2[i] + 0.3 * (i % 4) + z(rng);
  }
  return Make({"x1", "x2", "x3"}, {x1, x2, x3}, y, subj);
}

TEST_CASE("an exact line is recovered with zero residual") {
  const std::vector<double> x = {0, 1, 2, 3, 4, 5};
  std::vector<double> y;
  for (double v : x) y.push_back(1 + 2 * v);
  const CoefficientTable t = FitLinear(Make({"x"}, {x}, y), {"x"}, kNoSubjects);
  CHECK(t.Beta("(intercept)") == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.Beta("x") == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(t.rss < 1e-20);
  CHECK(std::isfinite(t.log_likelihood));
}

TEST_CASE("a duplicated column is rank deficient") {
  const std::vector<double> x = {0, 1, 2, 3, 4, 5}, y = {1, 3, 2, 5, 4, 6};
  try {
    FitLinear(Make({"x", "x_copy"}, {x, x}, y), {"x", "x_copy"}, kNoSubjects);
    FAIL("expected a rank-deficiency error");
  } catch (const Error &e) {
    const std::string msg = e.what();
    CHECK(msg.find("rank-deficient") != std::string::npos);
    CHECK((msg.find("x_copy") != std::string::npos || msg.find("x,") != std::string::npos ||
           msg.find(": x") != std::string::npos));
  }
}

TEST_CASE("too few rows or unknown predictors are errors") {
  const std::vector<double> x = {0, 1}, y = {1, 3};
  CHECK_THROWS_AS(FitLinear(Make({"x"}, {x}, y), {"x"}, kNoSubjects), Error);
  CHECK_THROWS_AS(FitLinear(Make({"x"}, {x}, y), {"z"}, kNoSubjects), LookupError);
  CHECK_THROWS_AS(FitLinear(Make({"x"}, {x}, y), {"x", "x"}, kNoSubjects), Error);
}

TEST_CASE("standard errors match the simple-regression formula") {
  const std::vector<double> x = {1, 2, 4, 5, 7, 8, 10};
  const std::vector<double> y = {2.1, 2.9, 5.2, 5.8, 8.4, 8.8, 11.5};
  const CoefficientTable t = FitLinear(Make({"x"}, {x}, y), {"x"}, kNoSubjects);
  double mx = 0;
  for (double v : x) mx += v / x.size();
  double sxx = 0;
  for (double v : x) sxx += (v - mx) * (v - mx);
  const double s2 = t.rss / (x.size() - 2);
  CHECK(t.se[t.Index("x")] == doctest::Approx(std::sqrt(s2 / sxx)).epsilon(1e-12));
  const double n = static_cast<double>(x.size());
  CHECK(t.log_likelihood ==
        doctest::Approx(-0.5 * n * (std::log(2 * std::numbers::pi * t.rss / n) + 1)).epsilon(1e-12));
}

TEST_CASE("effect-coded subject intercepts") {
  // Balanced: intercept is the mean of subject means, dummies the deviations.
  const std::vector<double> y = {10, 12, 20, 22, 30, 34};
  const std::vector<std::string> subj = {"a", "a", "b", "b", "c", "c"};
  const CoefficientTable t = FitLinear(Make({}, {}, y, subj), {}, {});
  CHECK(t.Beta("(intercept)") == doctest::Approx(21.333333333333333).epsilon(1e-12));
  CHECK(t.Beta("subject[a]") == doctest::Approx(11 - 21.333333333333333).epsilon(1e-12));
  CHECK(t.Beta("subject[b]") == doctest::Approx(21 - 21.333333333333333).epsilon(1e-12));
  CHECK_THROWS_AS(t.Index("subject[c]"), LookupError);
}

TEST_CASE("subject slopes add one column per subject contrast") {
  const RegressionDataset d = Noisy(400, 3);
  FitOptions opt{SubjectEffects::kInterceptsAndSlopes, {"x1"}};
  const CoefficientTable t = FitLinear(d, {"x1", "x2"}, opt);
  CHECK(t.p == 1 + 2 + 3 + 3);
  CHECK(t.Index("x1:subject[s0]") > t.Index("subject[s2]"));
  CHECK_THROWS_AS(t.Index("x2:subject[s0]"), LookupError);
}

TEST_CASE("chi-square survival function") {
  CHECK(std::abs(ChiSquareSf(3.841, 1) - 0.05) < 1e-3);
  CHECK(std::abs(ChiSquareSf(6.635, 1) - 0.01) < 1e-3);
  CHECK(std::abs(ChiSquareSf(2 * std::log(2.0), 2) - 0.5) < 1e-15);
  for (double x : {0.1, 1.0, 5.0, 20.0}) {
    CHECK(ChiSquareSf(x, 2) == doctest::Approx(std::exp(-x / 2)).epsilon(1e-13));
  }
  CHECK(ChiSquareSf(0.0, 3) == 1.0);
  CHECK_THROWS_AS(ChiSquareSf(1.0, 0), Error);
  CHECK_THROWS_AS(ChiSquareSf(-1.0, 1), Error);
}

TEST_CASE("likelihood-ratio statistic is n log of the RSS ratio") {
  const RegressionDataset d = Noisy(500, 7);
  const CoefficientTable full = FitLinear(d, {"x1", "x2", "x3"}, kNoSubjects);
  const CoefficientTable reduced = FitLinear(d, {"x1"}, kNoSubjects);
  const LrtResult r = Lrt(full, reduced);
  CHECK(r.df == 2);
  CHECK(r.statistic == doctest::Approx(500 * std::log(reduced.rss / full.rss)).epsilon(1e-9));
  CHECK(r.p_value == doctest::Approx(std::exp(-r.statistic / 2)).epsilon(1e-12));
  CHECK(r.p_value < 0.001);
}

TEST_CASE("identical models give a null test") {
  const RegressionDataset d = Noisy(200, 1);
  const CoefficientTable t = FitLinear(d, {"x1"});
  const LrtResult r = Lrt(t, t);
  CHECK(r.statistic == 0.0);
  CHECK(r.p_value == 1.0);
}

TEST_CASE("likelihood-ratio tests need nested fits on the same rows") {
  const RegressionDataset d = Noisy(200, 1);
  const CoefficientTable a = FitLinear(d, {"x1"});
  const CoefficientTable b = FitLinear(d, {"x2"});
  CHECK_THROWS_AS(Lrt(a, b), Error);
  const CoefficientTable other = FitLinear(Noisy(200, 2), {"x1"});
  CHECK_THROWS_AS(Lrt(FitLinear(d, {"x1", "x2"}), other), Error);
}

TEST_CASE("drop-one tests separate real and null predictors") {
  const RegressionDataset d = Noisy(2000, 5);
  const CoefficientTable t = FitWithDropOneTests(d, {"x1", "x2", "x3"});
  CHECK(t.p_value[t.Index("x1")] < 1e-6);
  CHECK(t.p_value[t.Index("x2")] < 1e-6);
  CHECK(t.p_value[t.Index("x3")] > 1e-3);
  CHECK(std::isnan(t.p_value[t.Index("(intercept)")]));
  const CoefficientTable plain = FitLinear(d, {"x1", "x2", "x3"});
  CHECK(t.beta == plain.beta);
}

TEST_CASE("coefficient table TSV round trip") {
  const CoefficientTable t = FitWithDropOneTests(Noisy(300, 9), {"x1", "x2"});
  std::stringstream buf;
  t.WriteTsv(buf);
  const CoefficientTable back = CoefficientTable::ReadTsv(buf, "<mem>");
  CHECK(back.names == t.names);
  CHECK(back.n == t.n);
  CHECK(back.p == t.p);
  CHECK(back.rows_fingerprint == t.rows_fingerprint);
  CHECK(back.log_likelihood == t.log_likelihood);
  for (std::size_t i = 0; i < t.names.size(); ++i) {
    CHECK(back.beta[i] == doctest::Approx(t.beta[i]).epsilon(1e-9));
    CHECK(back.se[i] == doctest::Approx(t.se[i]).epsilon(1e-9));
    CHECK(std::isnan(back.p_value[i]) == std::isnan(t.p_value[i]));
  }
}

TEST_CASE("model predictor sets") {
  const auto base = ModelPredictors(1);
  const auto bigram = ModelPredictors(2);
  CHECK(base.size() == 8);
  CHECK(bigram.size() == 10);
  CHECK(std::find(bigram.begin(), bigram.end(), "bigram_prev") != bigram.end());
  CHECK(std::find(base.begin(), base.end(), "loglen_n") == base.end());
  CHECK(ParseSubjectEffects("slopes") == SubjectEffects::kInterceptsAndSlopes);
  CHECK(SubjectEffectsName(SubjectEffects::kNone) == "none");
  CHECK_THROWS_AS(ParseSubjectEffects("random"), Error);
}

}  // namespace
}  // namespace locallm
