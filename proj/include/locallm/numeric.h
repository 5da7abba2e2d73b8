// numeric.h
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
// Log-domain arithmetic helpers.

#ifndef LOCALLM_NUMERIC_H_
#define LOCALLM_NUMERIC_H_

#include <cmath>
#include <limits>
#include <span>
#include <utility>

namespace locallm {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();
inline constexpr double kLn10 = 2.302585092994045684;

// log(exp(a) + exp(b)).
inline double LogAddExp(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

// log(sum_i exp(x_i)); kLogZero for an empty span.
double LogSumExp(std::span<const double> xs);

// Neumaier-compensated running sum. Summation order still matters at the
// last bit, but the error no longer grows with the number of terms.
class CompensatedSum {
 public:
  void Add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double Value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace locallm

#endif  // LOCALLM_NUMERIC_H_
