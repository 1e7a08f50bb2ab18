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

#ifndef QCASCADE_POLICIES_H_
#define QCASCADE_POLICIES_H_

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "qcascade/labels.h"
#include "qcascade/pipeline.h"

namespace qcascade {

enum class PolicyKind {
  kRandomRouting,    // llm with probability p, else small; no hint
  kMetaRouting,      // router on x predicts small failure -> llm
  kHybrid,           // router on x predicts llm beats small -> llm
  kRandomCascading,  // small, then llm (hinted) with probability p
  kMarginSampling,   // small, then llm (hinted) iff small confidence < tau
  kTrigger3,         // the three-trigger cascade
};

std::string_view PolicyKindName(PolicyKind kind);
PolicyKind ParsePolicyKind(std::string_view name);

struct Policy {
  std::string name;
  PolicyKind kind = PolicyKind::kTrigger3;
  double p = 0.0;
  double tau = 0.0;
  uint64_t seed = 0;
  std::shared_ptr<const Trigger> router;  // meta_routing, hybrid
  std::shared_ptr<const Trigger> ct;      // trigger3
  std::shared_ptr<const Trigger> lt;
  std::shared_ptr<const Trigger> ft;

  void Validate() const;  // ConfigError when params do not fit the kind
};

// Outcomes in input order. Random draws are taken from a generator seeded
// with `policy.seed`, one per query in input order, before any dispatch.
std::vector<PipelineOutcome> RunPolicy(const Policy& policy,
                                       const std::vector<ParallelPair>& pairs,
                                       const CorrectorPair& correctors,
                                       size_t parallelism = 1);

// 1 when the small model misses any success point on an erroneous pair.
int MetaRoutingLabel(const CorrectionRecord& record);
// 1 when the LLM's char F0.5 on the record strictly exceeds the small model's.
int HybridLabel(const CorrectionRecord& record);

// Trains a router on featurize(x). DataError on a single-class label set.
TriggerModel TrainRouter(PolicyKind kind,
                         const std::vector<CorrectionRecord>& records,
                         const TrainConfig& cfg,
                         Eigen::Index dim = kDefaultFeatureDim);

}  // namespace qcascade

#endif  // QCASCADE_POLICIES_H_
