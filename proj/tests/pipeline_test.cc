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

#include "qcascade/pipeline.h"

#include <gtest/gtest.h>

#include <sstream>

#include "mock_correctors.h"
#include "qcascade/errors.h"

namespace qcascade {
namespace {

using testing::CountingCorrector;
using testing::ForcedModelTrigger;

void ExpectInvariants(const PipelineOutcome& o) {
  ASSERT_TRUE(o.ct.has_value());
  if (!o.ct->fire) {
    EXPECT_FALSE(o.lt || o.ft || o.small_called || o.llm_called);
    EXPECT_EQ(o.y_final, o.x);
  }
  if (o.llm_called) {
    ASSERT_TRUE(o.lt.has_value());
    EXPECT_TRUE(o.lt->fire);
    EXPECT_TRUE(o.small_called);
  }
  if (o.ft && o.ft->fire) {
    EXPECT_EQ(o.y_final, o.x);
  }
  for (const auto& d : {o.ct, o.lt, o.ft}) {
    if (d) {
      EXPECT_GT(d->p, 0.0);
      EXPECT_LT(d->p, 1.0);
    }
  }
}

TEST(RunQueryTest, AllEightTriggerCombinations) {
  for (int mask = 0; mask < 8; ++mask) {
    const bool ct = mask & 1, lt = mask & 2, ft = mask & 4;
    auto small = CountingCorrector::Suffix("small", CostClass::kSmall, "+s");
    auto llm = CountingCorrector::Suffix("llm", CostClass::kLlm, "+l");
    const ModelTrigger t_ct = ForcedModelTrigger(ct);
    const ModelTrigger t_lt = ForcedModelTrigger(lt, TriggerKind::kLT);
    const ModelTrigger t_ft = ForcedModelTrigger(ft, TriggerKind::kFT);
    const PipelineOutcome o = RunQuery("q", {t_ct, t_lt, t_ft}, {small, llm});
    ExpectInvariants(o);

    std::string expected = "q";
    if (ct && !ft) expected = lt ? "q+l" : "q+s";
    EXPECT_EQ(o.y_final, expected) << "mask " << mask;
    EXPECT_EQ(o.small_called, ct);
    EXPECT_EQ(o.llm_called, ct && lt);
    EXPECT_EQ(small.calls(), ct ? 1 : 0);
    EXPECT_EQ(llm.calls(), ct && lt ? 1 : 0);
    EXPECT_EQ(o.lt.has_value(), ct);
    EXPECT_EQ(o.ft.has_value(), ct);
  }
}

TEST(RunQueryTest, LlmReceivesSmallRewriteAsHint) {
  auto small = CountingCorrector::Suffix("small", CostClass::kSmall, "+s");
  auto llm = CountingCorrector::Suffix("llm", CostClass::kLlm, "+l");
  const auto yes = PredicateTrigger::Constant(true);
  const auto no = PredicateTrigger::Constant(false);
  RunQuery("abc", {yes, yes, no}, {small, llm});
  ASSERT_EQ(llm.hints().size(), 1u);
  EXPECT_EQ(llm.hints()[0], std::optional<std::string>("abc+s"));
  EXPECT_EQ(small.hints()[0], std::nullopt);
}

TEST(RunQueryTest, TriggersSeeTheRightPair) {
  std::vector<std::pair<std::string, std::string>> seen;
  PredicateTrigger lt([&](auto x, auto y) {
    seen.emplace_back(std::string(x), std::string(*y));
    return true;
  });
  PredicateTrigger ft([&](auto x, auto y) {
    seen.emplace_back(std::string(x), std::string(*y));
    return false;
  });
  auto small = CountingCorrector::Suffix("small", CostClass::kSmall, "+s");
  auto llm = CountingCorrector::Suffix("llm", CostClass::kLlm, "+l");
  const auto yes = PredicateTrigger::Constant(true);
  RunQuery("x", {yes, lt, ft}, {small, llm});
  ASSERT_EQ(seen.size(), 2u);
  EXPECT_EQ(seen[0], (std::pair<std::string, std::string>{"x", "x+s"}));
  EXPECT_EQ(seen[1], (std::pair<std::string, std::string>{"x", "x+l"}));
}

TEST(RunQueryTest, IdentitySafety) {
  IdentityCorrector small("small", CostClass::kSmall);
  IdentityCorrector llm("llm", CostClass::kLlm);
  const auto yes = PredicateTrigger::Constant(true);
  const auto no = PredicateTrigger::Constant(false);
  for (const auto* lt : {&yes, &no}) {
    EXPECT_EQ(RunQuery("wether", {yes, *lt, no}, {small, llm}).y_final, "wether");
  }
}

TEST(RunQueryTest, CorrectorFailureDegradesToIdentity) {
  auto small = CountingCorrector::Suffix("small", CostClass::kSmall, "+s");
  testing::FailingCorrector llm;
  const auto yes = PredicateTrigger::Constant(true);
  const auto no = PredicateTrigger::Constant(false);
  const PipelineOutcome o = RunQuery("q", {yes, yes, no}, {small, llm});
  EXPECT_TRUE(o.failed);
  EXPECT_EQ(o.y_final, "q");
  EXPECT_EQ(o.y_small, std::optional<std::string>("q+s"));
  EXPECT_TRUE(o.llm_called);
  EXPECT_FALSE(o.ft.has_value());
  EXPECT_NE(o.error.find("unreachable"), std::string::npos);
}

TEST(RunQueryTest, InvalidCorrectionIsAFailure) {
  CountingCorrector bad("bad", CostClass::kSmall,
                        [](auto, auto) { return Correction{"x", 1.5}; });
  IdentityCorrector llm("llm", CostClass::kLlm);
  const auto yes = PredicateTrigger::Constant(true);
  EXPECT_TRUE(RunQuery("q", {yes, yes, yes}, {bad, llm}).failed);
}

std::vector<ParallelPair> Queries(int n) {
  std::vector<ParallelPair> pairs;
  for (int i = 0; i < n; ++i) {
    pairs.push_back({"q" + std::to_string(i), "query " + std::to_string(i), "query"});
  }
  return pairs;
}

TEST(RunCorpusTest, EmptyCorpus) {
  IdentityCorrector c("c", CostClass::kSmall);
  const auto yes = PredicateTrigger::Constant(true);
  EXPECT_TRUE(RunCorpus({}, {yes, yes, yes}, {c, c}, 4).empty());
}

TEST(RunCorpusTest, ParallelMatchesSequential) {
  auto small = CountingCorrector::Suffix("small", CostClass::kSmall, "+s");
  auto llm = CountingCorrector::Suffix("llm", CostClass::kLlm, "+l");
  const PredicateTrigger ct([](auto x, auto) { return x.back() != '0'; });
  const PredicateTrigger lt([](auto x, auto) { return x.back() == '2' || x.back() == '3'; });
  const PredicateTrigger ft([](auto x, auto) { return x.back() == '3'; });
  for (int n : {4, 97}) {
    const auto pairs = Queries(n);
    std::ostringstream a;
    std::ostringstream b;
    WriteTrace(a, RunCorpus(pairs, {ct, lt, ft}, {small, llm}, 1));
    WriteTrace(b, RunCorpus(pairs, {ct, lt, ft}, {small, llm}, 4));
    EXPECT_EQ(a.str(), b.str());
  }
}

TEST(RunCorpusTest, UnreachableCorrectorMarksFiredOutcomesFailed) {
  testing::FailingCorrector dead;
  IdentityCorrector llm("llm", CostClass::kLlm);
  const PredicateTrigger ct([](auto x, auto) { return x.back() != '0'; });
  const auto no = PredicateTrigger::Constant(false);
  const auto outcomes = RunCorpus(Queries(5), {ct, no, no}, {dead, llm}, 2);
  ASSERT_EQ(outcomes.size(), 5u);
  for (const auto& o : outcomes) EXPECT_EQ(o.failed, o.ct->fire);
}

TEST(LlmCoverageTest, Examples) {
  std::vector<PipelineOutcome> outcomes(4);
  EXPECT_DOUBLE_EQ(LlmCoverage(outcomes), 0.0);
  outcomes[2].llm_called = true;
  EXPECT_DOUBLE_EQ(LlmCoverage(outcomes), 0.25);
  for (auto& o : outcomes) o.llm_called = true;
  EXPECT_DOUBLE_EQ(LlmCoverage(outcomes), 1.0);
  EXPECT_THROW(LlmCoverage({}), DataError);
}

TEST(TraceTest, JsonRoundTrip) {
  auto small = CountingCorrector::Suffix("small", CostClass::kSmall, "+s");
  auto llm = CountingCorrector::Suffix("llm", CostClass::kLlm, "+l");
  const auto yes = PredicateTrigger::Constant(true);
  const auto no = PredicateTrigger::Constant(false);
  PipelineOutcome o = RunQuery("q", {yes, yes, no}, {small, llm});
  o.id = "id1";
  const nlohmann::json j = OutcomeToJson(o);
  const PipelineOutcome back = OutcomeFromJson(j);
  EXPECT_EQ(OutcomeToJson(back), j);
  EXPECT_EQ(j["y_llm"], "q+l");
  EXPECT_TRUE(j["router"].is_null());
}

}  // namespace
}  // namespace qcascade
