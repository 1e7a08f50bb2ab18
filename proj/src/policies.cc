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

#include "qcascade/policies.h"

#include <random>

#include "qcascade/errors.h"

namespace qcascade {
namespace {

void Fail(PipelineOutcome& out, const CorrectorError& e) {
  out.failed = true;
  out.error = e.what();
  out.y_final = out.x;
}

PipelineOutcome RouteDirect(std::string_view x, bool to_llm,
                            std::optional<TriggerDecision> router,
                            const CorrectorPair& correctors) {
  PipelineOutcome out;
  out.x = std::string(x);
  out.y_final = out.x;
  out.router = router;
  try {
    if (to_llm) {
      out.llm_called = true;
      out.y_llm = CallCorrector(correctors.llm, x, std::nullopt).corrected;
      out.y_final = *out.y_llm;
    } else {
      out.small_called = true;
      out.y_small = CallCorrector(correctors.small, x, std::nullopt).corrected;
      out.y_final = *out.y_small;
    }
  } catch (const CorrectorError& e) {
    Fail(out, e);
  }
  return out;
}

// Small first; `escalate` sees the small correction and decides on the LLM.
template <typename Escalate>
PipelineOutcome Cascade(std::string_view x, const CorrectorPair& correctors,
                        Escalate escalate) {
  PipelineOutcome out;
  out.x = std::string(x);
  out.y_final = out.x;
  try {
    out.small_called = true;
    const Correction small = CallCorrector(correctors.small, x, std::nullopt);
    out.y_small = small.corrected;
    out.y_final = small.corrected;
    if (escalate(small)) {
      out.llm_called = true;
      out.y_llm = CallCorrector(correctors.llm, x, small.corrected).corrected;
      out.y_final = *out.y_llm;
    }
  } catch (const CorrectorError& e) {
    Fail(out, e);
  }
  return out;
}

bool Requires(PolicyKind kind, PolicyKind a, PolicyKind b) {
  return kind == a || kind == b;
}

}  // namespace

std::string_view PolicyKindName(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kRandomRouting: return "random_routing";
    case PolicyKind::kMetaRouting: return "meta_routing";
    case PolicyKind::kHybrid: return "hybrid";
    case PolicyKind::kRandomCascading: return "random_cascading";
    case PolicyKind::kMarginSampling: return "margin_sampling";
    case PolicyKind::kTrigger3: return "trigger3";
  }
  return "?";
}

PolicyKind ParsePolicyKind(std::string_view name) {
  for (auto kind : {PolicyKind::kRandomRouting, PolicyKind::kMetaRouting,
                    PolicyKind::kHybrid, PolicyKind::kRandomCascading,
                    PolicyKind::kMarginSampling, PolicyKind::kTrigger3}) {
    if (PolicyKindName(kind) == name) return kind;
  }
  throw ConfigError("unknown policy kind '" + std::string(name) + "'");
}

void Policy::Validate() const {
  const std::string what = "policy '" + name + "': ";
  if (Requires(kind, PolicyKind::kRandomRouting, PolicyKind::kRandomCascading) &&
      !(p >= 0.0 && p <= 1.0)) {
    throw ConfigError(what + "p must be in [0, 1]");
  }
  if (kind == PolicyKind::kMarginSampling && !(tau >= 0.0 && tau <= 1.0)) {
    throw ConfigError(what + "tau must be in [0, 1]");
  }
  if (Requires(kind, PolicyKind::kMetaRouting, PolicyKind::kHybrid) && !router) {
    throw ConfigError(what + "needs a router model");
  }
  if (kind == PolicyKind::kTrigger3 && (!ct || !lt || !ft)) {
    throw ConfigError(what + "needs CT, LT and FT triggers");
  }
}

std::vector<PipelineOutcome> RunPolicy(const Policy& policy,
                                       const std::vector<ParallelPair>& pairs,
                                       const CorrectorPair& correctors,
                                       size_t parallelism) {
  policy.Validate();
  if (policy.kind == PolicyKind::kTrigger3) {
    return RunCorpus(pairs, {*policy.ct, *policy.lt, *policy.ft}, correctors,
                     parallelism);
  }

  std::vector<double> draws(pairs.size(), 0.0);
  if (Requires(policy.kind, PolicyKind::kRandomRouting,
               PolicyKind::kRandomCascading)) {
    std::mt19937_64 rng(policy.seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    for (double& u : draws) u = uniform(rng);
  }

  std::vector<PipelineOutcome> outcomes(pairs.size());
  ParallelFor(pairs.size(), parallelism, [&](size_t i) {
    const std::string& x = pairs[i].source;
    PipelineOutcome& out = outcomes[i];
    switch (policy.kind) {
      case PolicyKind::kRandomRouting:
        out = RouteDirect(x, draws[i] < policy.p, std::nullopt, correctors);
        break;
      case PolicyKind::kMetaRouting:
      case PolicyKind::kHybrid: {
        const TriggerDecision d = policy.router->Decide(x, std::nullopt);
        out = RouteDirect(x, d.fire, d, correctors);
        break;
      }
      case PolicyKind::kRandomCascading:
        out = Cascade(x, correctors,
                      [&](const Correction&) { return draws[i] < policy.p; });
        break;
      case PolicyKind::kMarginSampling:
        out = Cascade(x, correctors, [&](const Correction& c) {
          return c.confidence < policy.tau;
        });
        break;
      case PolicyKind::kTrigger3:
        break;
    }
    out.id = pairs[i].id;
  });
  return outcomes;
}

int MetaRoutingLabel(const CorrectionRecord& record) {
  if (!record.pair.erroneous()) return 0;
  const EditIndicators s = IndicatorsFor(record, CorrectorSide::kSmall);
  return (s.tp == 0 || s.fp > 0 || s.fn > 0) ? 1 : 0;
}

int HybridLabel(const CorrectionRecord& record) {
  const double small = Prf(IndicatorsFor(record, CorrectorSide::kSmall)).f_beta;
  const double llm = Prf(IndicatorsFor(record, CorrectorSide::kLlm)).f_beta;
  return llm > small ? 1 : 0;
}

TriggerModel TrainRouter(PolicyKind kind,
                         const std::vector<CorrectionRecord>& records,
                         const TrainConfig& cfg, Eigen::Index dim) {
  if (!Requires(kind, PolicyKind::kMetaRouting, PolicyKind::kHybrid)) {
    throw ConfigError("routers exist only for meta_routing and hybrid");
  }
  std::vector<TrainingExample> examples;
  examples.reserve(records.size());
  for (const CorrectionRecord& r : records) {
    const int label = kind == PolicyKind::kMetaRouting ? MetaRoutingLabel(r)
                                                       : HybridLabel(r);
    examples.push_back({Featurize(r.pair.source, std::nullopt, dim), label});
  }
  try {
    return Train(examples, TriggerKind::kRouter, cfg);
  } catch (const DataError& e) {
    throw DataError(std::string(PolicyKindName(kind)) + " router: " + e.what());
  }
}

}  // namespace qcascade
