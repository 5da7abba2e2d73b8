// test_util.h
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

#ifndef LOCALLM_TESTS_TEST_UTIL_H_
#define LOCALLM_TESTS_TEST_UTIL_H_

#include <cmath>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "locallm/corpus.h"
#include "locallm/language_model.h"

namespace locallm::testing {

inline std::string DataPath(const std::string &name) {
  return std::string(LOCALLM_DATA_DIR) + "/" + name;
}

// Extracted desk corpus (train.txt, heldout.txt).
inline std::string CorpusPath(const std::string &name) {
  return std::string(LOCALLM_CORPUS_DIR) + "/" + name;
}

inline std::string TempPath(const std::string &name) {
  return std::string(LOCALLM_TEMP_DIR) + "/" + name;
}

inline std::vector<std::vector<std::string>> Lines(const std::string &text) {
  std::istringstream in(text);
  return ReadTokenizedLines(in);
}

inline std::shared_ptr<const Vocabulary> VocabOf(const std::string &text,
                                                 std::uint64_t min_count = 1) {
  return std::make_shared<const Vocabulary>(BuildVocabulary(Lines(text), min_count));
}

// The same distribution in every context; probabilities indexed by WordId
// with the <s> slot ignored.
class FixedLM : public LanguageModel {
 public:
  FixedLM(std::shared_ptr<const Vocabulary> vocab, const std::vector<double> &probs,
          bool full = true)
      : vocab_(std::move(vocab)), dist_(vocab_->size()), full_(full) {
    for (WordId w = 1; w < vocab_->size(); ++w) dist_[w] = std::log(probs.at(w));
  }
  const Vocabulary &vocab() const override { return *vocab_; }
  int ContextLength() const override { return 0; }
  double LogProb(WordId word, std::span<const WordId>) const override { return dist_[word]; }
  bool HasFullDistribution() const override { return full_; }
  LogDistribution FullDistribution(std::span<const WordId>) const override { return dist_; }

 private:
  std::shared_ptr<const Vocabulary> vocab_;
  LogDistribution dist_;
  bool full_;
};

}  // namespace locallm::testing

#endif  // LOCALLM_TESTS_TEST_UTIL_H_
