// external_lm_test.cc
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
#include <sstream>

#include "doctest.h"
#include "locallm/error.h"
#include "locallm/evaluation.h"
#include "locallm/external_lm.h"
#include "locallm/kneser_ney.h"
#include "test_util.h"

namespace locallm {
namespace {

TokenLogProbSeries Parse(const std::string &text) {
  std::istringstream in(text);
  return LoadTokenLogProbs(in, "<mem>");
}

TEST_CASE("a well-formed row is accepted") {
  const auto s = Parse("0\t0\tthe\t-2.3\n");
  REQUIRE(s.records().size() == 1);
  CHECK(s.At(0, 0).word == "the");
  CHECK(s.At(0, 0).logprob == -2.3);
}

TEST_CASE("a positive log-probability is rejected") {
  CHECK_THROWS_AS(Parse("0\t0\tthe\t0.5\n"), ParseError);
}

TEST_CASE("malformed series report their line") {
  try {
    Parse("sent_idx\ttok_idx\tword\tlogprob\n0\t0\ta\t-1\n0\t2\tb\t-1\n");
    FAIL("expected a parse error");
  } catch (const ParseError &e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(Parse("0\t0\ta\tabc\n"), ParseError);
  CHECK_THROWS_AS(Parse("0\t0\ta\n"), ParseError);
  CHECK_THROWS_AS(Parse("x\t0\ta\t-1\n"), ParseError);
  CHECK_THROWS_AS(Parse("1\t0\ta\t-1\n0\t0\tb\t-1\n"), ParseError);
}

TEST_CASE("surprisal flips the sign") {
  const auto s = Parse("# comment\n0\t0\ta\t-2.3\n0\t1\tb\t0\n");
  CHECK(s.SurprisalOf(0, 0) == 2.3);
  CHECK(s.SurprisalOf(0, 1) == 0.0);
  CHECK_THROWS_AS(s.SurprisalOf(0, 2), LookupError);
  CHECK_THROWS_AS(s.SurprisalOf(3, 0), LookupError);
}

TEST_CASE("mean surprisal is minus the mean log-probability") {
  const auto s = Parse("0\t0\ta\t-1.5\n0\t1\tb\t-0.25\n1\t0\tc\t-3\n");
  double mean_surprisal = 0, mean_logprob = 0;
  for (std::size_t sent = 0; sent < s.sentence_count(); ++sent) {
    for (std::size_t t = 0; t < s.Sentence(sent).size(); ++t) {
      mean_surprisal += s.SurprisalOf(sent, t) / 3;
    }
  }
  for (const auto &r : s.records()) mean_logprob += r.logprob / 3;
  CHECK(mean_surprisal == doctest::Approx(-mean_logprob).epsilon(1e-15));
  CHECK(Perplexity(s) == doctest::Approx(std::exp(4.75 / 3)).epsilon(1e-12));
}

TEST_CASE("series aligned against the evaluation text") {
  const auto vocab = testing::VocabOf("a b c\n");
  const TokenStream text = Encode(testing::Lines("a b\nc\n"), *vocab);
  Parse("0\t0\ta\t-1\n0\t1\tb\t-1\n0\t2\t</s>\t-1\n1\t0\tc\t-1\n1\t1\t</s>\t-1\n")
      .CheckAlignment(text, *vocab);
  // One token short in the first sentence.
  CHECK_THROWS_AS(Parse("0\t0\ta\t-1\n0\t1\tb\t-1\n1\t0\tc\t-1\n1\t1\t</s>\t-1\n")
                      .CheckAlignment(text, *vocab),
                  AlignmentError);
  CHECK_THROWS_AS(Parse("0\t0\ta\t-1\n0\t1\tc\t-1\n0\t2\t</s>\t-1\n1\t0\tc\t-1\n1\t1\t</s>\t-1\n")
                      .CheckAlignment(text, *vocab),
                  AlignmentError);
}

TEST_CASE("scored streams round trip and keep the model's perplexity") {
  const auto path = testing::DataPath("oracle/ref_corpus.txt");
  const auto vocab = std::make_shared<const Vocabulary>(BuildVocabularyFromFile(path, 2));
  const TokenStream stream = EncodeFile(path, *vocab);
  const KneserNeyLM lm = TrainKneserNey(stream, vocab, 3);
  const TokenLogProbSeries s = ScoreStream(lm, stream, "kn3");
  s.CheckAlignment(stream, *vocab);
  CHECK(Perplexity(s) == doctest::Approx(Perplexity(lm, stream)).epsilon(1e-12));

  std::stringstream buf;
  s.WriteTsv(buf);
  const TokenLogProbSeries back = LoadTokenLogProbs(buf, "<mem>");
  REQUIRE(back.records().size() == s.records().size());
  for (std::size_t i = 0; i < s.records().size(); ++i) {
    CHECK(std::abs(back.records()[i].logprob - s.records()[i].logprob) < 1e-9);
  }
  back.CheckAlignment(stream, *vocab);
}

TEST_CASE("series mix additively with a local model only") {
  const auto path = testing::DataPath("oracle/ref_corpus.txt");
  const auto vocab = std::make_shared<const Vocabulary>(BuildVocabularyFromFile(path, 1));
  const TokenStream stream = EncodeFile(path, *vocab);
  const KneserNeyLM tri = TrainKneserNey(stream, vocab, 3);
  const KneserNeyLM uni = TrainKneserNey(stream, vocab, 1);
  const TokenLogProbSeries s = ScoreStream(tri, stream, "kn3");

  const TokenLogProbSeries mixed =
      MixWithSeries(s, uni, stream, InterpolationMode::kAdditive, 0.25);
  CHECK(mixed.source_label() == "kn3+local");
  auto base = std::shared_ptr<const LanguageModel>(&tri, [](const LanguageModel *) {});
  auto local = std::shared_ptr<const LanguageModel>(&uni, [](const LanguageModel *) {});
  const double direct =
      Perplexity(InterpolationSpec{InterpolationMode::kAdditive, 0.25, base, local}, stream);
  CHECK(Perplexity(mixed) == doctest::Approx(direct).epsilon(1e-12));
  CHECK_THROWS_AS(MixWithSeries(s, uni, stream, InterpolationMode::kMultiplicative, 0.25),
                  CapabilityError);
}

}  // namespace
}  // namespace locallm
