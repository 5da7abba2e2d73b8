// language_model.cc
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

#include "locallm/language_model.h"

#include <algorithm>
#include <cmath>

#include "locallm/error.h"
#include "locallm/numeric.h"

namespace locallm {

double LogSumExp(std::span<const double> xs) {
  if (xs.empty()) return kLogZero;
  const double m = *std::max_element(xs.begin(), xs.end());
  if (m == kLogZero) return kLogZero;
  if (std::isinf(m)) return m;
  double sum = 0.0;
  for (double x : xs) sum += std::exp(x - m);
  return m + std::log(sum);
}

double LogDistribution::LogMass() const { return LogSumExp(values_); }

LogDistribution LanguageModel::FullDistribution(
    std::span<const WordId> context) const {
  const auto &v = vocab();
  LogDistribution dist(v.size());
  for (WordId w = 1; w < v.size(); ++w) dist[w] = LogProb(w, context);
  return dist;
}

std::span<const WordId> TruncateContext(std::span<const WordId> context, int n) {
  const std::size_t keep = std::min<std::size_t>(context.size(), std::max(n, 0));
  return context.last(keep);
}

UniformLM::UniformLM(std::shared_ptr<const Vocabulary> vocab)
    : vocab_(std::move(vocab)),
      log_p_(-std::log(static_cast<double>(vocab_->predictable_size()))) {}

double UniformLM::LogProb(WordId word, std::span<const WordId>) const {
  if (word == kBosId) throw Error("the begin sentinel is never predicted");
  return log_p_;
}

LogDistribution UniformLM::FullDistribution(std::span<const WordId>) const {
  return LogDistribution(vocab_->size(), log_p_);
}

}  // namespace locallm
