// interpolation.h
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
// Two-model interpolation. gamma always weights the LOCAL model:
//
//   additive:        p(w|h) = gamma p_local(w|h) + (1 - gamma) p_base(w|h)
//   multiplicative:  log p~(w|h) = gamma log p_local + (1 - gamma) log p_base
//                    log p(w|h)  = log p~(w|h) - log sum_{v in V} p~(v|h)
//
// The multiplicative normalizer is an exact sum over every predictable
// vocabulary item (<s> excluded), computed once per context and cached.

#ifndef LOCALLM_INTERPOLATION_H_
#define LOCALLM_INTERPOLATION_H_

#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>

#include "locallm/language_model.h"
#include "locallm/ngram.h"

namespace locallm {

enum class InterpolationMode { kAdditive, kMultiplicative };

std::string_view ModeName(InterpolationMode mode);
// Accepts "add"/"additive" and "mult"/"multiplicative".
InterpolationMode ParseMode(std::string_view name);

struct InterpolationSpec {
  InterpolationMode mode = InterpolationMode::kMultiplicative;
  double gamma = 0.0;
  std::shared_ptr<const LanguageModel> base;   // p2
  std::shared_ptr<const LanguageModel> local;  // p1

  // Throws Error on gamma outside [0, 1], missing models or mismatched
  // vocabularies, and CapabilityError when multiplicative mode meets a
  // model without full distributions.
  void Validate() const;
};

// log(gamma e^local + (1 - gamma) e^base); exact at the endpoints.
double MixAdditive(double log_local, double log_base, double gamma);
// gamma log_local + (1 - gamma) log_base; exact at the endpoints.
double MixMultiplicative(double log_local, double log_base, double gamma);
// log sum_i exp(MixMultiplicative(local[i], base[i], gamma)).
double MultiplicativeLogNormalizer(std::span<const double> local,
                                   std::span<const double> base, double gamma);

// Context -> log normalizer. Concurrent readers; insertions are serialized
// and keep the first value stored for a key.
class NormalizerCache {
 public:
  std::optional<double> Find(const NGram &context) const;
  // Returns the cached value for `context` if present, else stores `value`.
  double Insert(const NGram &context, double value);
  std::size_t size() const;
  void Clear();

 private:
  mutable std::shared_mutex mu_;
  NGramMap<double> values_;
};

double AdditiveLogProb(const InterpolationSpec &spec, WordId word,
                       std::span<const WordId> context);
double MultiplicativeLogProb(const InterpolationSpec &spec, WordId word,
                             std::span<const WordId> context,
                             NormalizerCache &cache);
// Entrywise consistent with the two scalar functions above.
LogDistribution InterpolatedDistribution(const InterpolationSpec &spec,
                                         std::span<const WordId> context,
                                         NormalizerCache &cache);

// An interpolation spec packaged as a language model with its own cache.
class InterpolatedLM : public LanguageModel {
 public:
  explicit InterpolatedLM(InterpolationSpec spec);

  const Vocabulary &vocab() const override { return spec_.base->vocab(); }
  int ContextLength() const override;
  double LogProb(WordId word, std::span<const WordId> context) const override;
  bool HasFullDistribution() const override;
  LogDistribution FullDistribution(std::span<const WordId> context) const override;

  const InterpolationSpec &spec() const { return spec_; }
  const NormalizerCache &cache() const { return cache_; }

 private:
  InterpolationSpec spec_;
  mutable NormalizerCache cache_;
};

}  // namespace locallm

#endif  // LOCALLM_INTERPOLATION_H_
