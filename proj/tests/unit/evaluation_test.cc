// evaluation_test.cc
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
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"
#include "locallm/error.h"
#include "locallm/evaluation.h"
#include "locallm/kneser_ney.h"
#include "test_util.h"

namespace locallm {
namespace {

// Maximum-likelihood unigram over the predicted tokens of a stream.
class MleUnigram : public LanguageModel {
 public:
  MleUnigram(std::shared_ptr<const Vocabulary> vocab, const TokenStream &stream)
      : vocab_(std::move(vocab)) {
    double total = 0;
    for (const auto &s : stream.sentences) {
      for (std::size_t t = 1; t < s.size(); ++t) {
        counts_[s[t]] += 1;
        total += 1;
      }
    }
    for (auto &[w, c] : counts_) c /= total;
  }
  const Vocabulary &vocab() const override { return *vocab_; }
  int ContextLength() const override { return 0; }
  double LogProb(WordId word, std::span<const WordId>) const override {
    auto it = counts_.find(word);
    return it == counts_.end() ? -INFINITY : std::log(it->second);
  }

 private:
  std::shared_ptr<const Vocabulary> vocab_;
  std::map<WordId, double> counts_;
};

class CertainLM : public LanguageModel {
 public:
  explicit CertainLM(std::shared_ptr<const Vocabulary> vocab) : vocab_(std::move(vocab)) {}
  const Vocabulary &vocab() const override { return *vocab_; }
  int ContextLength() const override { return 0; }
  double LogProb(WordId, std::span<const WordId>) const override { return 0.0; }

 private:
  std::shared_ptr<const Vocabulary> vocab_;
};

struct Models {
  std::shared_ptr<const Vocabulary> vocab;
  TokenStream train, eval;
  std::unique_ptr<KneserNeyLM> trigram, unigram;
};

const Models &Ref() {
  static const Models m = [] {
    Models r;
    auto lines = [] {
      std::ifstream in(testing::DataPath("oracle/ref_corpus.txt"));
      return ReadTokenizedLines(in);
    }();
    const std::size_t split = lines.size() * 9 / 10;
    std::vector<std::vector<std::string>> train(lines.begin(), lines.begin() + split);
    std::vector<std::vector<std::string>> eval(lines.begin() + split, lines.end());
    r.vocab = std::make_shared<const Vocabulary>(BuildVocabulary(train, 1));
    r.train = Encode(train, *r.vocab);
    r.eval = Encode(eval, *r.vocab);
    r.trigram = std::make_unique<KneserNeyLM>(TrainKneserNey(r.train, r.vocab, 3));
    r.unigram = std::make_unique<KneserNeyLM>(TrainKneserNey(r.train, r.vocab, 1));
    return r;
  }();
  return m;
}

TEST_CASE("uniform model perplexity is the vocabulary size") {
  std::string text;
  for (int i = 0; i < 48; ++i) text += "w" + std::to_string(i) + " ";
  const auto vocab = testing::VocabOf(text + "\n");
  // 48 words, </s> and <unk> can be predicted.
  REQUIRE(vocab->predictable_size() == 50);
  UniformLM lm(vocab);
  const TokenStream eval = Encode(testing::Lines(text + "\nw3 w4 zz\n"), *vocab);
  CHECK(Perplexity(lm, eval) == doctest::Approx(50.0).epsilon(1e-14));
}

TEST_CASE("a model certain of every token has perplexity one") {
  const auto vocab = testing::VocabOf("a b c\n");
  CHECK(Perplexity(CertainLM(vocab), Encode(testing::Lines("a b\nc a\n"), *vocab)) == 1.0);
}

TEST_CASE("unigram MLE perplexity matches the hand computation") {
  const std::string text = "a b a c a\nb a d\n";
  const auto vocab = testing::VocabOf(text);
  const TokenStream s = Encode(testing::Lines(text), *vocab);
  REQUIRE(s.PredictedTokenCount() == 10);
  // exp(-(4 ln .4 + 4 ln .2 + 2 ln .1) / 10)
  CHECK(Perplexity(MleUnigram(vocab, s), s) ==
        doctest::Approx(4.35275281648062069568).epsilon(1e-13));
}

TEST_CASE("perplexity is exp of the mean surprisal") {
  const auto &r = Ref();
  CHECK(std::abs(std::exp(MeanSurprisal(*r.trigram, r.eval)) - Perplexity(*r.trigram, r.eval)) <
        1e-9);
}

TEST_CASE("zero-probability tokens are named in the error") {
  const std::string text = "a b a c a\nb a d\n";
  const auto vocab = testing::VocabOf(text);
  const MleUnigram lm(vocab, Encode(testing::Lines("a b\n"), *vocab));
  try {
    Perplexity(lm, Encode(testing::Lines("a c\n"), *vocab));
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(std::string(e.what()).find("'c'") != std::string::npos);
  }
  CHECK_THROWS_AS(PerplexityFromLogProbs({}), Error);
}

TEST_CASE("sweep endpoints reproduce the component perplexities") {
  const auto &r = Ref();
  const double base = Perplexity(*r.trigram, r.eval);
  const double local = Perplexity(*r.unigram, r.eval);
  for (auto mode : {InterpolationMode::kAdditive, InterpolationMode::kMultiplicative}) {
    const SweepResult s = Sweep(*r.trigram, *r.unigram, mode, r.eval);
    REQUIRE(s.grid.size() == 101);
    CHECK(s.grid.front().gamma == 0.0);
    CHECK(s.grid.back().gamma == 1.0);
    CHECK(std::abs(s.base_perplexity - base) < 1e-9);
    CHECK(std::abs(s.local_perplexity - local) < 1e-9);
    CHECK(s.best_perplexity <= std::min(base, local));
    CHECK(s.grid[s.best_index].perplexity == s.best_perplexity);
  }
}

TEST_CASE("interior sweep points match direct interpolation") {
  const auto &r = Ref();
  auto base = std::shared_ptr<const LanguageModel>(r.trigram.get(), [](const LanguageModel *) {});
  auto local = std::shared_ptr<const LanguageModel>(r.unigram.get(), [](const LanguageModel *) {});
  for (auto mode : {InterpolationMode::kAdditive, InterpolationMode::kMultiplicative}) {
    const SweepResult s = Sweep(*r.trigram, *r.unigram, mode, r.eval, 0.25);
    REQUIRE(s.grid.size() == 5);
    for (const auto &p : s.grid) {
      CHECK(Perplexity(InterpolationSpec{mode, p.gamma, base, local}, r.eval) ==
            doctest::Approx(p.perplexity).epsilon(1e-12));
    }
  }
}

TEST_CASE("sweeping a model against itself is flat") {
  const auto &r = Ref();
  for (auto mode : {InterpolationMode::kAdditive, InterpolationMode::kMultiplicative}) {
    const SweepResult s = Sweep(*r.trigram, *r.trigram, mode, r.eval, 0.05);
    for (const auto &p : s.grid) {
      CHECK(p.perplexity == doctest::Approx(s.base_perplexity).epsilon(1e-9));
    }
  }
}

TEST_CASE("sweep grid step must divide one") {
  const auto &r = Ref();
  CHECK_THROWS_AS(Sweep(*r.trigram, *r.unigram, InterpolationMode::kAdditive, r.eval, 0.03),
                  Error);
  CHECK_THROWS_AS(Sweep(*r.trigram, *r.unigram, InterpolationMode::kAdditive, r.eval, 0.0),
                  Error);
}

TEST_CASE("sweep CSV round trip") {
  const auto &r = Ref();
  const SweepResult s = Sweep(*r.trigram, *r.unigram, InterpolationMode::kMultiplicative, r.eval);
  std::stringstream buf;
  WriteSweepCsv(s, buf);
  const std::string text = buf.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 102);
  const auto back = ReadSweepCsv(buf, "<mem>");
  REQUIRE(back.size() == s.grid.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(std::abs(back[i].gamma - s.grid[i].gamma) < 1e-6);
    CHECK(std::abs(back[i].perplexity - s.grid[i].perplexity) < 1e-6);
    if (i > 0 && std::abs(s.grid[i].perplexity - s.grid[i - 1].perplexity) > 2e-6) {
      CHECK((back[i].perplexity < back[i - 1].perplexity) ==
            (s.grid[i].perplexity < s.grid[i - 1].perplexity));
    }
  }
}

}  // namespace
}  // namespace locallm
