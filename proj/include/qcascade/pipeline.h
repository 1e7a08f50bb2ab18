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

#ifndef QCASCADE_PIPELINE_H_
#define QCASCADE_PIPELINE_H_

#include <algorithm>
#include <atomic>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "json.hpp"
#include "qcascade/corpus.h"
#include "qcascade/corrector.h"
#include "qcascade/trigger.h"

namespace qcascade {

// A binary decision over a query and, for LT/FT, a candidate rewrite.
class Trigger {
 public:
  virtual ~Trigger() = default;
  virtual TriggerDecision Decide(std::string_view x,
                                 std::optional<std::string_view> y) const = 0;
};

class ModelTrigger final : public Trigger {
 public:
  explicit ModelTrigger(TriggerModel model) : model_(std::move(model)) {}

  TriggerDecision Decide(std::string_view x,
                         std::optional<std::string_view> y) const override;
  const TriggerModel& model() const { return model_; }

 private:
  TriggerModel model_;
};

// Decision from an arbitrary predicate, reported with probability
// 1 - eps or eps. Used for oracle triggers and forced-path tests.
class PredicateTrigger final : public Trigger {
 public:
  using Fn = std::function<bool(std::string_view, std::optional<std::string_view>)>;
  static constexpr double kEpsilon = 1e-6;

  explicit PredicateTrigger(Fn fn) : fn_(std::move(fn)) {}
  static PredicateTrigger Constant(bool fire);

  TriggerDecision Decide(std::string_view x,
                         std::optional<std::string_view> y) const override;

 private:
  Fn fn_;
};

struct TriggerSet {
  const Trigger& ct;
  const Trigger& lt;
  const Trigger& ft;
};

struct CorrectorPair {
  const Corrector& small;
  const Corrector& llm;
};

// Everything a policy did for one query. `ct`, `lt`, `ft` are populated by
// the cascade; `router` by the routing baselines.
struct PipelineOutcome {
  std::string id;
  std::string x;
  std::string y_final;
  std::optional<TriggerDecision> ct;
  std::optional<TriggerDecision> lt;
  std::optional<TriggerDecision> ft;
  std::optional<TriggerDecision> router;
  bool small_called = false;
  bool llm_called = false;
  std::optional<std::string> y_small;
  std::optional<std::string> y_llm;
  bool failed = false;
  std::string error;
};

// Calls `corrector`, validating the returned correction. Throws
// CorrectorError on any failure.
Correction CallCorrector(const Corrector& corrector, std::string_view query,
                         std::optional<std::string_view> hint);

// CT -> small -> LT -> LLM (with the small rewrite as hint) -> FT.
// A corrector failure marks the outcome failed and degrades y_final to x.
PipelineOutcome RunQuery(std::string_view x, const TriggerSet& triggers,
                         const CorrectorPair& correctors);

// Runs `fn(i)` for i in [0, n) on up to `parallelism` threads (0 means
// hardware concurrency).
template <typename Fn>
void ParallelFor(size_t n, size_t parallelism, Fn fn) {
  if (parallelism == 0) parallelism = std::max(1u, std::thread::hardware_concurrency());
  parallelism = std::min(parallelism, n);
  if (parallelism <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::jthread> workers;
  workers.reserve(parallelism);
  for (size_t t = 0; t < parallelism; ++t) {
    workers.emplace_back([&] {
      for (size_t i = next++; i < n; i = next++) fn(i);
    });
  }
}

// Outcomes are in input order whatever the parallelism.
std::vector<PipelineOutcome> RunCorpus(const std::vector<ParallelPair>& pairs,
                                       const TriggerSet& triggers,
                                       const CorrectorPair& correctors,
                                       size_t parallelism = 1);

// Fraction of outcomes that called the LLM. DataError when empty.
double LlmCoverage(const std::vector<PipelineOutcome>& outcomes);

nlohmann::json OutcomeToJson(const PipelineOutcome& outcome);
PipelineOutcome OutcomeFromJson(const nlohmann::json& j);
void WriteTrace(std::ostream& out, const std::vector<PipelineOutcome>& outcomes);

}  // namespace qcascade

#endif  // QCASCADE_PIPELINE_H_
