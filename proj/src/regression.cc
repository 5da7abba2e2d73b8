// regression.cc
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

#include "locallm/regression.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>

#include "locallm/error.h"

namespace locallm {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t Fingerprint(const std::vector<double> &y) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ y.size();
  for (double v : y) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    h = (h ^ bits) * 0x100000001b3ULL;
    h ^= h >> 29;
  }
  return h;
}

std::string Format(double x) {
  if (std::isnan(x)) return "NA";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

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

SubjectEffects ParseSubjectEffects(const std::string &name) {
  if (name == "none") return SubjectEffects::kNone;
  if (name == "intercepts") return SubjectEffects::kIntercepts;
  if (name == "slopes" || name == "intercepts_and_local_slopes") {
    return SubjectEffects::kInterceptsAndSlopes;
  }
  throw Error("unknown subject effects '" + name + "'");
}

std::string SubjectEffectsName(SubjectEffects e) {
  switch (e) {
    case SubjectEffects::kNone: return "none";
    case SubjectEffects::kIntercepts: return "intercepts";
    case SubjectEffects::kInterceptsAndSlopes: return "slopes";
  }
  return "?";
}

std::size_t CoefficientTable::Index(const std::string &name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  throw LookupError("no coefficient '" + name + "'");
}

void CoefficientTable::WriteTsv(std::ostream &out) const {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", log_likelihood);
  out << "# log_likelihood\t" << buf << '\n';
  std::snprintf(buf, sizeof(buf), "%.17g", rss);
  out << "# rss\t" << buf << '\n';
  out << "# n\t" << n << '\n';
  out << "# p\t" << p << '\n';
  out << "# rows_fingerprint\t" << rows_fingerprint << '\n';
  out << "predictor\tbeta\tse\tp_value\n";
  for (std::size_t i = 0; i < names.size(); ++i) {
    out << names[i] << '\t' << Format(beta[i]) << '\t' << Format(se[i]) << '\t'
        << Format(p_value[i]) << '\n';
  }
}

CoefficientTable CoefficientTable::ReadTsv(std::istream &in, const std::string &source) {
  CoefficientTable t;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = SplitTabs(line);
    if (line[0] == '#') {
      if (f.size() != 2) continue;
      try {
        if (f[0] == "# log_likelihood") t.log_likelihood = std::stod(f[1]);
        if (f[0] == "# rss") t.rss = std::stod(f[1]);
        if (f[0] == "# n") t.n = std::stoull(f[1]);
        if (f[0] == "# p") t.p = std::stoull(f[1]);
        if (f[0] == "# rows_fingerprint") t.rows_fingerprint = std::stoull(f[1]);
      } catch (const std::exception &) {
        throw ParseError(source, lineno, "bad metadata value");
      }
      continue;
    }
    if (!header) {
      if (f.size() != 4 || f[0] != "predictor") {
        throw ParseError(source, lineno, "expected predictor/beta/se/p_value header");
      }
      header = true;
      continue;
    }
    if (f.size() != 4) throw ParseError(source, lineno, "expected 4 columns");
    double b, s, pv;
    if (!ParseValue(f[1], &b) || !ParseValue(f[2], &s) || !ParseValue(f[3], &pv)) {
      throw ParseError(source, lineno, "bad number");
    }
    t.names.push_back(f[0]);
    t.beta.push_back(b);
    t.se.push_back(s);
    t.p_value.push_back(pv);
  }
  if (!header) throw ParseError(source, lineno, "missing coefficient header");
  return t;
}

CoefficientTable FitLinear(const RegressionDataset &data,
                           const std::vector<std::string> &predictors,
                           const FitOptions &options) {
  const std::size_t n = data.rows();
  std::set<std::string> seen;
  for (const auto &p : predictors) {
    if (!seen.insert(p).second) throw Error("predictor '" + p + "' listed twice");
    data.Column(p);
  }

  std::vector<std::string> subjects;
  if (options.subject_effects != SubjectEffects::kNone) {
    subjects = data.subjects;
    std::sort(subjects.begin(), subjects.end());
    subjects.erase(std::unique(subjects.begin(), subjects.end()), subjects.end());
  }
  std::vector<int> subject_of(n, 0);
  for (std::size_t i = 0; i < n && !subjects.empty(); ++i) {
    subject_of[i] = static_cast<int>(
        std::lower_bound(subjects.begin(), subjects.end(), data.subjects[i]) -
        subjects.begin());
  }
  // Effect coding: subject k < S-1 gets its own column, the last subject is
  // -1 in all of them.
  auto effect = [&](std::size_t row, std::size_t k) -> double {
    const int s = subject_of[row];
    if (s == static_cast<int>(k)) return 1.0;
    if (s == static_cast<int>(subjects.size()) - 1) return -1.0;
    return 0.0;
  };

  std::vector<std::string> names{"(intercept)"};
  names.insert(names.end(), predictors.begin(), predictors.end());
  const std::size_t dummies = subjects.empty() ? 0 : subjects.size() - 1;
  for (std::size_t k = 0; k < dummies; ++k) names.push_back("subject[" + subjects[k] + "]");
  std::vector<std::string> slopes;
  if (options.subject_effects == SubjectEffects::kInterceptsAndSlopes) {
    for (const auto &s : options.slope_predictors) {
      if (std::find(predictors.begin(), predictors.end(), s) != predictors.end()) {
        slopes.push_back(s);
      }
    }
    for (const auto &s : slopes) {
      for (std::size_t k = 0; k < dummies; ++k) {
        names.push_back(s + ":subject[" + subjects[k] + "]");
      }
    }
  }
  const std::size_t p = names.size();
  if (n <= p) {
    throw Error("need more rows than parameters (n = " + std::to_string(n) +
                ", p = " + std::to_string(p) + ")");
  }

  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) y(i) = data.response[i];
  std::size_t c = 0;
  x.col(c++).setOnes();
  for (const auto &pred : predictors) {
    const auto &col = data.Column(pred);
    for (std::size_t i = 0; i < n; ++i) x(i, c) = col[i];
    ++c;
  }
  for (std::size_t k = 0; k < dummies; ++k, ++c) {
    for (std::size_t i = 0; i < n; ++i) x(i, c) = effect(i, k);
  }
  for (const auto &s : slopes) {
    const auto &col = data.Column(s);
    for (std::size_t k = 0; k < dummies; ++k, ++c) {
      for (std::size_t i = 0; i < n; ++i) x(i, c) = col[i] * effect(i, k);
    }
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  const auto rank = static_cast<std::size_t>(qr.rank());
  if (rank < p) {
    std::string cols;
    const auto &perm = qr.colsPermutation().indices();
    for (std::size_t i = rank; i < p; ++i) {
      if (!cols.empty()) cols += ", ";
      cols += names[perm(i)];
    }
    throw Error("rank-deficient design (rank " + std::to_string(rank) + " of " +
                std::to_string(p) + "); collinear columns: " + cols);
  }
  const Eigen::VectorXd beta = qr.solve(y);
  const Eigen::VectorXd resid = y - x * beta;
  const double rss = resid.squaredNorm();

  // (X'X)^-1 = P R^-1 R^-T P'.
  const Eigen::MatrixXd r =
      qr.matrixR().topLeftCorner(p, p).template triangularView<Eigen::Upper>();
  const Eigen::MatrixXd rinv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::VectorXd diag_perm = rinv.rowwise().squaredNorm();
  const double s2 = rss / static_cast<double>(n - p);

  CoefficientTable t;
  t.names = std::move(names);
  t.beta.assign(beta.data(), beta.data() + p);
  t.se.resize(p);
  const auto &perm = qr.colsPermutation().indices();
  for (std::size_t i = 0; i < p; ++i) t.se[perm(i)] = std::sqrt(diag_perm(i) * s2);
  t.p_value.assign(p, kNaN);
  t.rss = rss;
  t.n = n;
  t.p = p;
  const double sigma2 =
      std::max(rss / static_cast<double>(n), std::numeric_limits<double>::min());
  t.log_likelihood =
      -0.5 * static_cast<double>(n) * (std::log(2.0 * std::numbers::pi * sigma2) + 1.0);
  t.rows_fingerprint = Fingerprint(data.response);
  return t;
}

double ChiSquareSf(double x, int df) {
  if (df < 1) throw Error("chi-square degrees of freedom must be >= 1");
  if (!(x >= 0.0)) throw Error("chi-square statistic must be >= 0");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

LrtResult Lrt(const CoefficientTable &full, const CoefficientTable &reduced) {
  if (full.n != reduced.n || full.rows_fingerprint != reduced.rows_fingerprint) {
    throw Error("likelihood-ratio test needs fits to the same rows");
  }
  const std::set<std::string> terms(full.names.begin(), full.names.end());
  for (const auto &name : reduced.names) {
    if (!terms.count(name)) {
      throw Error("models are not nested: '" + name + "' is missing from the full model");
    }
  }
  LrtResult r;
  r.df = static_cast<int>(full.p) - static_cast<int>(reduced.p);
  r.statistic = std::max(0.0, 2.0 * (full.log_likelihood - reduced.log_likelihood));
  if (r.df == 0) {
    r.statistic = 0.0;
    r.p_value = 1.0;
    return r;
  }
  r.p_value = ChiSquareSf(r.statistic, r.df);
  return r;
}

CoefficientTable FitWithDropOneTests(const RegressionDataset &data,
                                     const std::vector<std::string> &predictors,
                                     const FitOptions &options) {
  CoefficientTable full = FitLinear(data, predictors, options);
  for (const auto &drop : predictors) {
    std::vector<std::string> rest;
    for (const auto &p : predictors) {
      if (p != drop) rest.push_back(p);
    }
    const CoefficientTable reduced = FitLinear(data, rest, options);
    full.p_value[full.Index(drop)] = Lrt(full, reduced).p_value;
  }
  return full;
}

std::vector<std::string> ModelPredictors(int local_order) {
  std::vector<std::string> p = {"surprisal_n", "surprisal_prev", "logfreq_n",
                                "logfreq_prev"};
  if (local_order > 1) {
    const auto local = LocalColumns(local_order);
    p.insert(p.end(), local.begin(), local.end());
  }
  for (const char *n : {"freq_x_len_n", "freq_x_len_prev", "prev_fixated", "word_number"}) {
    p.emplace_back(n);
  }
  return p;
}

}  // namespace locallm
