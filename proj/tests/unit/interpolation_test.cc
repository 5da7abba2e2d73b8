// interpolation_test.cc
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

#include <cmath>
#include <random>

#include "doctest.h"
#include "locallm/error.h"
#include "locallm/interpolation.h"
#include "locallm/kneser_ney.h"
#include "locallm/numeric.h"
#include "test_util.h"

namespace locallm {
namespace {

using testing::FixedLM;

// Vocabulary {<s>, </s>, <unk>, a, b}.
std::shared_ptr<const Vocabulary> TwoWords() {
  return testing::VocabOf("a b\n");
}

std::shared_ptr<const LanguageModel> Fixed(std::shared_ptr<const Vocabulary> v, double pa,
                                           double pb, bool full = true) {
  return std::make_shared<FixedLM>(v, std::vector<double>{0, 0, 0, pa, pb}, full);
}

double SumExp(const LogDistribution &d) {
  CompensatedSum s;
  for (double x : d.values()) s.Add(std::exp(x));
  return s.Value();
}

struct RefModels {
  std::shared_ptr<const Vocabulary> vocab;
  TokenStream stream;
  std::shared_ptr<const KneserNeyLM> trigram, unigram;
};

const RefModels &Ref() {
  static const RefModels m = [] {
    RefModels r;
    const auto path = testing::DataPath("oracle/ref_corpus.txt");
    r.vocab = std::make_shared<const Vocabulary>(BuildVocabularyFromFile(path, 1));
    r.stream = EncodeFile(path, *r.vocab);
    r.trigram = std::make_shared<const KneserNeyLM>(TrainKneserNey(r.stream, r.vocab, 3));
    r.unigram = std::make_shared<const KneserNeyLM>(TrainKneserNey(r.stream, r.vocab, 1));
    return r;
  }();
  return m;
}

std::vector<std::vector<WordId>> RandomContexts(std::size_t count, std::uint64_t seed) {
  const auto &r = Ref();
  std::mt19937_64 rng(seed);
  std::vector<std::vector<WordId>> out;
  std::uniform_int_distribution<WordId> any(1, static_cast<WordId>(r.vocab->size() - 1));
  std::uniform_int_distribution<std::size_t> sent(0, r.stream.sentences.size() - 1);
  while (out.size() < count) {
    // Alternate observed histories and arbitrary word pairs.
    if (out.size() % 2 == 0) {
      const auto &s = r.stream.sentences[sent(rng)];
      std::uniform_int_distribution<std::size_t> pos(1, s.size() - 1);
      const std::size_t p = pos(rng);
      out.emplace_back(s.begin(), s.begin() + p);
    } else {
      out.push_back({kBosId, any(rng), any(rng)});
      if (out.back()[1] == kEosId) out.back()[1] = kUnkId;
      if (out.back()[2] == kEosId) out.back()[2] = kUnkId;
    }
  }
  return out;
}

TEST_CASE("additive midpoint") {
  CHECK(std::exp(MixAdditive(std::log(0.8), std::log(0.4), 0.5)) ==
        doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("mixing endpoints are exact") {
  const double l = std::log(0.8), b = std::log(0.4);
  CHECK(MixAdditive(l, b, 1.0) == l);
  CHECK(MixAdditive(l, b, 0.0) == b);
  CHECK(MixMultiplicative(l, b, 1.0) == l);
  CHECK(MixMultiplicative(l, b, 0.0) == b);
}

TEST_CASE("additive mixture stays between its components") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(1e-12, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double p1 = u(rng), p2 = u(rng), g = u(rng);
    const double p = std::exp(MixAdditive(std::log(p1), std::log(p2), g));
    CHECK(p >= std::min(p1, p2) * (1 - 1e-12));
    CHECK(p <= std::max(p1, p2) * (1 + 1e-12));
  }
}

TEST_CASE("multiplicative two-word closed form") {
  const auto v = TwoWords();
  InterpolatedLM lm({InterpolationMode::kMultiplicative, 0.5, Fixed(v, 0.5, 0.5),
                     Fixed(v, 0.8, 0.2)});
  const double pa = std::exp(lm.LogProb(v->Lookup("a"), {}));
  const double expected = std::sqrt(0.4) / (std::sqrt(0.4) + std::sqrt(0.1));
  CHECK(std::abs(expected - 2.0 / 3.0) < 1e-15);
  CHECK(std::abs(pa - 2.0 / 3.0) < 1e-9);
  CHECK(std::abs(std::exp(lm.LogProb(v->Lookup("b"), {})) - 1.0 / 3.0) < 1e-9);
}

TEST_CASE("multiplicative normalizer kernel") {
  const std::vector<double> l = {std::log(0.8), std::log(0.2)};
  const std::vector<double> b = {std::log(0.5), std::log(0.5)};
  CHECK(MultiplicativeLogNormalizer(l, b, 0.5) ==
        doctest::Approx(std::log(std::sqrt(0.4) + std::sqrt(0.1))).epsilon(1e-14));
  CHECK(MultiplicativeLogNormalizer(l, b, 0.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(MultiplicativeLogNormalizer(l, std::vector<double>{0.0}, 0.5), Error);
}

TEST_CASE("multiplicative at gamma 0 reproduces the base distribution") {
  const auto &r = Ref();
  InterpolationSpec spec{InterpolationMode::kMultiplicative, 0.0, r.trigram, r.unigram};
  NormalizerCache cache;
  for (const auto &ctx : RandomContexts(10, 3)) {
    const LogDistribution mixed = InterpolatedDistribution(spec, ctx, cache);
    const LogDistribution base = r.trigram->FullDistribution(ctx);
    for (WordId w = 1; w < r.vocab->size(); ++w) CHECK(mixed[w] == base[w]);
  }
}

TEST_CASE("interpolated distributions sum to one") {
  const auto &r = Ref();
  for (auto mode : {InterpolationMode::kMultiplicative, InterpolationMode::kAdditive}) {
    for (double g : {0.1, 0.5, 0.9}) {
      InterpolationSpec spec{mode, g, r.trigram, r.unigram};
      NormalizerCache cache;
      for (const auto &ctx : RandomContexts(100, 5)) {
        CHECK(std::abs(SumExp(InterpolatedDistribution(spec, ctx, cache)) - 1.0) < 1e-6);
      }
    }
  }
}

TEST_CASE("multiplicative distribution agrees with per-word queries") {
  const auto &r = Ref();
  InterpolationSpec spec{InterpolationMode::kMultiplicative, 0.3, r.trigram, r.unigram};
  NormalizerCache cache;
  for (const auto &ctx : RandomContexts(6, 9)) {
    const LogDistribution d = InterpolatedDistribution(spec, ctx, cache);
    for (WordId w = 1; w < r.vocab->size(); ++w) {
      CHECK(MultiplicativeLogProb(spec, w, ctx, cache) == doctest::Approx(d[w]).epsilon(1e-12));
    }
  }
}

TEST_CASE("normalizers are cached per truncated context") {
  const auto &r = Ref();
  InterpolatedLM lm({InterpolationMode::kMultiplicative, 0.3, r.trigram, r.unigram});
  const std::vector<WordId> a = {kBosId, 5, 6, 7}, b = {kBosId, 9, 6, 7};
  const double first = lm.LogProb(8, a);
  CHECK(lm.cache().size() == 1);
  CHECK(lm.LogProb(8, b) == first);
  CHECK(lm.cache().size() == 1);
  lm.LogProb(8, std::vector<WordId>{kBosId, 6});
  CHECK(lm.cache().size() == 2);
}

TEST_CASE("identical components are a fixed point of both modes") {
  const auto &r = Ref();
  for (auto mode : {InterpolationMode::kMultiplicative, InterpolationMode::kAdditive}) {
    for (double g : {0.0, 0.25, 0.5, 1.0}) {
      InterpolationSpec spec{mode, g, r.trigram, r.trigram};
      NormalizerCache cache;
      for (const auto &ctx : RandomContexts(5, 13)) {
        const LogDistribution d = InterpolatedDistribution(spec, ctx, cache);
        const LogDistribution p = r.trigram->FullDistribution(ctx);
        for (WordId w = 1; w < r.vocab->size(); ++w) {
          CHECK(d[w] == doctest::Approx(p[w]).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("interpolation spec validation") {
  const auto v = TwoWords();
  InterpolationSpec spec{InterpolationMode::kAdditive, 1.5, Fixed(v, 0.5, 0.5),
                         Fixed(v, 0.8, 0.2)};
  CHECK_THROWS_AS(spec.Validate(), Error);
  spec.gamma = -0.1;
  CHECK_THROWS_AS(spec.Validate(), Error);
  spec.gamma = 0.5;
  spec.Validate();
  spec.local = Fixed(testing::VocabOf("a c\n"), 0.5, 0.5);
  CHECK_THROWS_AS(spec.Validate(), Error);
}

TEST_CASE("multiplicative mode needs full distributions") {
  const auto v = TwoWords();
  InterpolationSpec spec{InterpolationMode::kMultiplicative, 0.5, Fixed(v, 0.5, 0.5),
                         Fixed(v, 0.8, 0.2, false)};
  CHECK_THROWS_AS(InterpolatedLM{spec}, CapabilityError);
  spec.mode = InterpolationMode::kAdditive;
  InterpolatedLM additive(spec);
  CHECK(std::exp(additive.LogProb(v->Lookup("a"), {})) == doctest::Approx(0.65));
}

TEST_CASE("mode names") {
  CHECK(ParseMode("add") == InterpolationMode::kAdditive);
  CHECK(ParseMode("mult") == InterpolationMode::kMultiplicative);
  CHECK(ModeName(InterpolationMode::kMultiplicative) == "mult");
  CHECK_THROWS_AS(ParseMode("geometric"), Error);
}

}  // namespace
}  // namespace locallm
