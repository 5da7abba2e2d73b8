// language_model.h
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
// Common query interface for language models. All log-probabilities are
// natural logs.

#ifndef LOCALLM_LANGUAGE_MODEL_H_
#define LOCALLM_LANGUAGE_MODEL_H_

#include <memory>
#include <span>
#include <vector>

#include "locallm/corpus.h"

namespace locallm {

// Log-probabilities over every predictable vocabulary item (all ids but
// <s>), indexed by WordId.
class LogDistribution {
 public:
  LogDistribution() = default;
  explicit LogDistribution(std::size_t vocab_size, double fill = 0.0)
      : values_(vocab_size - 1, fill) {}

  double operator[](WordId id) const { return values_[id - 1]; }
  double &operator[](WordId id) { return values_[id - 1]; }

  // Number of entries, i.e. |V| minus the begin sentinel.
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  // log sum_w exp(entry); 0 for a normalized distribution.
  double LogMass() const;

 private:
  std::vector<double> values_;
};

class LanguageModel {
 public:
  virtual ~LanguageModel() = default;

  virtual const Vocabulary &vocab() const = 0;

  // Longest history the model looks at; longer contexts are truncated to
  // their last ContextLength() tokens.
  virtual int ContextLength() const = 0;

  // log p(word | context). `context` lists the preceding tokens oldest
  // first, normally starting with <s>. Out-of-range ids score as <unk>.
  virtual double LogProb(WordId word, std::span<const WordId> context) const = 0;

  // Whether FullDistribution is available.
  virtual bool HasFullDistribution() const { return true; }

  // log p(w | context) for every predictable w. The default loops over
  // LogProb; models override it with something faster.
  virtual LogDistribution FullDistribution(std::span<const WordId> context) const;
};

// The last `n` tokens of `context` (all of it if shorter).
std::span<const WordId> TruncateContext(std::span<const WordId> context, int n);

// p(w) = 1 / (|V| - 1) for every predictable item.
class UniformLM : public LanguageModel {
 public:
  explicit UniformLM(std::shared_ptr<const Vocabulary> vocab);

  const Vocabulary &vocab() const override { return *vocab_; }
  int ContextLength() const override { return 0; }
  double LogProb(WordId word, std::span<const WordId> context) const override;
  LogDistribution FullDistribution(std::span<const WordId> context) const override;

 private:
  std::shared_ptr<const Vocabulary> vocab_;
  double log_p_;
};

}  // namespace locallm

#endif  // LOCALLM_LANGUAGE_MODEL_H_
