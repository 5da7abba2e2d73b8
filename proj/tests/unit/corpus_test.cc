// corpus_test.cc
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

#include <sstream>

#include "doctest.h"
#include "locallm/corpus.h"
#include "locallm/error.h"
#include "test_util.h"

namespace locallm {
namespace {

using testing::Lines;

TEST_CASE("vocabulary keeps every word at min_count 1") {
  const Vocabulary v = BuildVocabulary(Lines("a a b\n"), 1);
  CHECK(v.size() == 5);
  CHECK(v.Word(kBosId) == "<s>");
  CHECK(v.Word(kEosId) == "</s>");
  CHECK(v.Word(kUnkId) == "<unk>");
  CHECK(v.Contains("a"));
  CHECK(v.Contains("b"));
  CHECK(v.predictable_size() == 4);
}

TEST_CASE("vocabulary threshold maps rare words to unk") {
  const Vocabulary v = BuildVocabulary(Lines("a a b\n"), 2);
  CHECK(v.Contains("a"));
  CHECK_FALSE(v.Contains("b"));
  CHECK(v.Lookup("b") == kUnkId);
  CHECK(v.Count(kUnkId) == 1);
}

TEST_CASE("vocabulary of an empty corpus is an error") {
  CHECK_THROWS_AS(BuildVocabulary(Lines("\n\n"), 1), Error);
}

TEST_CASE("desk corpus vocabulary size matches a distinct-token count") {
  // Distinct lowercased whitespace tokens of train.txt, counted by sort -u.
  const Vocabulary v = BuildVocabularyFromFile(testing::CorpusPath("train.txt"), 1);
  CHECK(v.size() == 31498 + 3);
}

TEST_CASE("encode brackets sentences with sentinels") {
  const Vocabulary v = BuildVocabulary(Lines("a b\n"), 1);
  const TokenStream s = Encode(Lines("a b\n"), v);
  REQUIRE(s.sentences.size() == 1);
  CHECK(s.sentences[0] == std::vector<WordId>{kBosId, v.Lookup("a"), v.Lookup("b"), kEosId});
  CHECK(s.PredictedTokenCount() == 3);
}

TEST_CASE("encode maps unknown words to unk") {
  const Vocabulary v = BuildVocabulary(Lines("a\n"), 1);
  const TokenStream s = Encode(Lines("a z\n"), v);
  CHECK(s.sentences[0] == std::vector<WordId>{kBosId, v.Lookup("a"), kUnkId, kEosId});
}

TEST_CASE("literal sentinels in text are unknown words") {
  const Vocabulary v = BuildVocabulary(Lines("a <s> </s> <unk>\n"), 1);
  CHECK(v.size() == 4);
  const TokenStream s = Encode(Lines("<s> a\n"), v);
  CHECK(s.sentences[0][1] == kUnkId);
}

TEST_CASE("decode inverts encode up to unknown words") {
  const std::string text = "the cat sat\nthe dog sat on the mat\n";
  const Vocabulary v = BuildVocabulary(Lines(text), 2);
  std::istringstream in(text);
  const TokenStream s = Encode(in, v);
  CHECK(Decode(s, v) == "the <unk> sat\nthe <unk> sat <unk> the <unk>\n");
  const Vocabulary all = BuildVocabulary(Lines(text), 1);
  CHECK(Decode(Encode(Lines(text), all), all) == text);
}

TEST_CASE("tokenization lowercases and splits on whitespace") {
  CHECK(Tokenize("  It's  A\tTest .\r") == std::vector<std::string>{"it's", "a", "test", "."});
  CHECK(Lines("a\n\n   \nb\n").size() == 2);
}

TEST_CASE("vocabulary TSV round trip") {
  const Vocabulary v = BuildVocabulary(Lines("x y y z z z\n"), 1);
  std::stringstream buf;
  v.WriteTsv(buf);
  const Vocabulary back = Vocabulary::ReadTsv(buf, "<mem>");
  CHECK(back == v);
  for (WordId w = 0; w < v.size(); ++w) CHECK(back.Count(w) == v.Count(w));
}

}  // namespace
}  // namespace locallm
