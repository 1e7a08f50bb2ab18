// Copyright 2026 The qcascade Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qcascade/corpus.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "qcascade/errors.h"
#include "qcascade/utf8.h"
#include "test_util.h"

namespace qcascade {
namespace {

std::vector<ParallelPair> Parse(const std::string& text) {
  std::istringstream in(text);
  return ParseCorpus(in);
}

std::string ErrorOf(const std::string& text) {
  try {
    Parse(text);
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

TEST(CorpusIoTest, EmptyFile) { EXPECT_TRUE(Parse("").empty()); }

TEST(CorpusIoTest, OneRecord) {
  const auto pairs = Parse(R"({"id":"q1","source":"abc","target":"abc"})" "\n");
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0], (ParallelPair{"q1", "abc", "abc"}));
  EXPECT_FALSE(pairs[0].erroneous());
}

TEST(CorpusIoTest, Errors) {
  EXPECT_NE(ErrorOf("{\"id\":\"a\",\"source\":\"x\",\"target\":\"x\"}\n"
                    "{\"id\":\"a\",\"source\":\"y\",\"target\":\"y\"}\n")
                .find("duplicate id"),
            std::string::npos);
  EXPECT_NE(ErrorOf("{\"id\":\"a\",\"source\":\"x\",\"target\":\"x\"}\nnot json\n")
                .find("line 2"),
            std::string::npos);
  EXPECT_NE(ErrorOf("{\"id\":\"a\",\"source\":\"x\"}\n").find("schema error"), std::string::npos);
  EXPECT_NE(ErrorOf("{\"id\":\"a\",\"source\":\"  \",\"target\":\"x\"}\n").find("non-empty"),
            std::string::npos);
}

TEST(CorpusIoTest, SaveLoadRoundTrip) {
  std::mt19937_64 rng(1);
  const std::vector<std::string> pieces{"a", "\"", "\\", "中", " ", "\t", "é", "{"};
  std::vector<ParallelPair> pairs;
  for (int i = 0; i < 200; ++i) {
    auto text = [&] {
      std::string s = "q";
      for (int k = static_cast<int>(rng() % 6); k > 0; --k) s += pieces[rng() % pieces.size()];
      return s;
    };
    pairs.push_back({"id" + std::to_string(i), text(), text()});
  }
  testing::TempDir dir;
  SaveCorpus(dir / "c.jsonl", pairs);
  EXPECT_EQ(LoadCorpus(dir / "c.jsonl"), pairs);
}

TEST(ConfusionTableTest, ParseAndValidate) {
  std::istringstream good(R"({"char":"a","confusions":["o","e"]})" "\n");
  const ConfusionTable t = ParseConfusionTable(good);
  EXPECT_EQ(t.entries.at("a"), (std::vector<std::string>{"o", "e"}));

  std::istringstream self(R"({"char":"a","confusions":["a"]})" "\n");
  EXPECT_THROW(ParseConfusionTable(self), DataError);
  std::istringstream multi(R"({"char":"ab","confusions":["c"]})" "\n");
  EXPECT_THROW(ParseConfusionTable(multi), DataError);
}

TEST(NoiseOpTest, ForcedOperations) {
  EXPECT_EQ(ApplyNoiseOp("abcd", NoiseOp::kAdjacentTransposition, 1), "acbd");
  EXPECT_EQ(ApplyNoiseOp("ab", NoiseOp::kConfusionSubstitution, 0, "o"), "ob");
  EXPECT_EQ(ApplyNoiseOp("ab", NoiseOp::kRandomInsertion, 2, "c"), "abc");
  EXPECT_EQ(ApplyNoiseOp("中文", NoiseOp::kRandomDeletion, 0), "文");
  EXPECT_THROW(ApplyNoiseOp("a", NoiseOp::kAdjacentTransposition, 0), DataError);
}

std::vector<std::string> CleanQueries(size_t n) {
  const std::vector<std::string> words{"cheap", "flights", "weather", "iphone", "天气", "北京", "news"};
  std::vector<std::string> out;
  for (size_t i = 0; i < n; ++i) {
    out.push_back(words[i % words.size()] + " " + words[(i * 3 + 1) % words.size()]);
  }
  return out;
}

ConfusionTable SmallTable() {
  ConfusionTable t;
  t.entries["a"] = {"e"};
  t.entries["e"] = {"a", "i"};
  t.entries["天"] = {"添"};
  return t;
}

TEST(InjectNoiseTest, ZeroRateLeavesQueriesClean) {
  NoiseConfig cfg;
  cfg.error_rate = 0.0;
  for (const ParallelPair& p : InjectNoise(CleanQueries(50), SmallTable(), cfg)) {
    EXPECT_EQ(p.source, p.target);
  }
}

TEST(InjectNoiseTest, ExactCorruptionCountAndOneOperation) {
  const auto clean = CleanQueries(333);
  for (double rate : {0.1, 0.5, 0.747, 1.0}) {
    NoiseConfig cfg;
    cfg.seed = 42;
    cfg.error_rate = rate;
    const auto pairs = InjectNoise(clean, SmallTable(), cfg);
    size_t corrupted = 0;
    for (size_t i = 0; i < pairs.size(); ++i) {
      EXPECT_EQ(pairs[i].target, clean[i]);
      if (!pairs[i].erroneous()) continue;
      ++corrupted;
      const size_t d = testing::OracleEditDistance(utf8::Codepoints(pairs[i].source),
                                                   utf8::Codepoints(pairs[i].target));
      EXPECT_TRUE(d == 1 || d == 2) << pairs[i].source;
    }
    EXPECT_EQ(corrupted, static_cast<size_t>(std::llround(rate * 333)));
  }
}

TEST(InjectNoiseTest, Deterministic) {
  NoiseConfig cfg;
  cfg.seed = 9;
  cfg.error_rate = 0.6;
  std::ostringstream a;
  std::ostringstream b;
  WriteCorpus(a, InjectNoise(CleanQueries(100), SmallTable(), cfg));
  WriteCorpus(b, InjectNoise(CleanQueries(100), SmallTable(), cfg));
  EXPECT_EQ(a.str(), b.str());
  cfg.seed = 10;
  std::ostringstream c;
  WriteCorpus(c, InjectNoise(CleanQueries(100), SmallTable(), cfg));
  EXPECT_NE(a.str(), c.str());
}

TEST(InjectNoiseTest, ShortQueriesFallBackToInsertion) {
  NoiseConfig cfg;
  cfg.error_rate = 1.0;
  cfg.op_weights = {0.0, 1.0, 0.0, 1.0};  // transposition and deletion only
  const auto pairs = InjectNoise({"a", "b", "x"}, {}, cfg);
  for (const ParallelPair& p : pairs) {
    EXPECT_EQ(utf8::Length(p.source), 2u) << p.source;
  }
}

TEST(InjectNoiseTest, ConfigErrors) {
  NoiseConfig cfg;
  cfg.error_rate = 0.5;
  EXPECT_THROW(InjectNoise({"abc"}, {}, cfg), ConfigError);  // substitution needs a table
  cfg.error_rate = 1.5;
  EXPECT_THROW(InjectNoise({"abc"}, SmallTable(), cfg), ConfigError);
  cfg.error_rate = 0.5;
  cfg.op_weights = {0, 0, 0, 0};
  EXPECT_THROW(InjectNoise({"abc"}, SmallTable(), cfg), ConfigError);
  cfg.op_weights = {1, 1, 1, 1};
  EXPECT_THROW(InjectNoise({"abc", " "}, SmallTable(), cfg), DataError);
}

TEST(CorpusStatsTest, Examples) {
  const CorpusStats half = ComputeCorpusStats({{"1", "ab", "ab"}, {"2", "abcd", "abce"}});
  EXPECT_DOUBLE_EQ(half.error_rate, 0.5);
  EXPECT_DOUBLE_EQ(half.avg_source_length, 3.0);
  EXPECT_EQ(half.count, 2u);
  EXPECT_DOUBLE_EQ(ComputeCorpusStats({{"1", "中文", "中文"}}).avg_source_length, 2.0);
  EXPECT_DOUBLE_EQ(ComputeCorpusStats({{"1", "x", "x"}}).error_rate, 0.0);
  EXPECT_THROW(ComputeCorpusStats({}), DataError);
}

}  // namespace
}  // namespace qcascade
