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

#include <ostream>

#include "qcascade/errors.h"
#include "qcascade/utf8.h"

namespace qcascade {

TriggerDecision ModelTrigger::Decide(std::string_view x,
                                     std::optional<std::string_view> y) const {
  return qcascade::Decide(model_, Featurize(x, y, model_.dim()));
}

PredicateTrigger PredicateTrigger::Constant(bool fire) {
  return PredicateTrigger([fire](auto, auto) { return fire; });
}

TriggerDecision PredicateTrigger::Decide(
    std::string_view x, std::optional<std::string_view> y) const {
  const bool fire = fn_(x, y);
  return {fire, fire ? 1.0 - kEpsilon : kEpsilon};
}

Correction CallCorrector(const Corrector& corrector, std::string_view query,
                         std::optional<std::string_view> hint) {
  Correction c;
  try {
    c = corrector.Correct(query, hint);
  } catch (const CorrectorError&) {
    throw;
  } catch (const std::exception& e) {
    throw CorrectorError(std::string(corrector.name()) + ": " + e.what());
  }
  if (utf8::Trim(c.corrected).empty()) {
    throw CorrectorError(std::string(corrector.name()) + ": empty correction");
  }
  if (!(c.confidence >= 0.0 && c.confidence <= 1.0)) {
    throw CorrectorError(std::string(corrector.name()) +
                         ": confidence outside [0, 1]");
  }
  return c;
}

PipelineOutcome RunQuery(std::string_view x, const TriggerSet& triggers,
                         const CorrectorPair& correctors) {
  PipelineOutcome out;
  out.x = std::string(x);
  out.y_final = out.x;
  out.ct = triggers.ct.Decide(x, std::nullopt);
  if (!out.ct->fire) return out;

  try {
    out.small_called = true;
    out.y_small = CallCorrector(correctors.small, x, std::nullopt).corrected;

    out.lt = triggers.lt.Decide(x, *out.y_small);
    const std::string* y_c = &*out.y_small;
    if (out.lt->fire) {
      out.llm_called = true;
      out.y_llm = CallCorrector(correctors.llm, x, *out.y_small).corrected;
      y_c = &*out.y_llm;
    }

    out.ft = triggers.ft.Decide(x, *y_c);
    out.y_final = out.ft->fire ? out.x : *y_c;
  } catch (const CorrectorError& e) {
    out.failed = true;
    out.error = e.what();
    out.y_final = out.x;
  }
  return out;
}

std::vector<PipelineOutcome> RunCorpus(const std::vector<ParallelPair>& pairs,
                                       const TriggerSet& triggers,
                                       const CorrectorPair& correctors,
                                       size_t parallelism) {
  std::vector<PipelineOutcome> outcomes(pairs.size());
  ParallelFor(pairs.size(), parallelism, [&](size_t i) {
    outcomes[i] = RunQuery(pairs[i].source, triggers, correctors);
    outcomes[i].id = pairs[i].id;
  });
  return outcomes;
}

double LlmCoverage(const std::vector<PipelineOutcome>& outcomes) {
  if (outcomes.empty()) throw DataError("coverage of an empty outcome list");
  const auto n = std::count_if(outcomes.begin(), outcomes.end(),
                               [](const auto& o) { return o.llm_called; });
  return static_cast<double>(n) / static_cast<double>(outcomes.size());
}

namespace {

nlohmann::json DecisionJson(const std::optional<TriggerDecision>& d) {
  if (!d) return nullptr;
  return {{"p", d->p}, {"fired", d->fire}};
}

std::optional<TriggerDecision> DecisionFrom(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return TriggerDecision{j.at("fired").get<bool>(), j.at("p").get<double>()};
}

nlohmann::json OptionalText(const std::optional<std::string>& s) {
  return s ? nlohmann::json(*s) : nlohmann::json();
}

}  // namespace

nlohmann::json OutcomeToJson(const PipelineOutcome& o) {
  nlohmann::json j;
  j["id"] = o.id;
  j["x"] = o.x;
  j["y_final"] = o.y_final;
  j["ct"] = DecisionJson(o.ct);
  j["lt"] = DecisionJson(o.lt);
  j["ft"] = DecisionJson(o.ft);
  j["router"] = DecisionJson(o.router);
  j["small_called"] = o.small_called;
  j["llm_called"] = o.llm_called;
  j["y_small"] = OptionalText(o.y_small);
  j["y_llm"] = OptionalText(o.y_llm);
  j["failed"] = o.failed;
  j["error"] = o.failed ? nlohmann::json(o.error) : nlohmann::json();
  return j;
}

PipelineOutcome OutcomeFromJson(const nlohmann::json& j) {
  PipelineOutcome o;
  o.id = j.at("id").get<std::string>();
  o.x = j.at("x").get<std::string>();
  o.y_final = j.at("y_final").get<std::string>();
  o.ct = DecisionFrom(j.at("ct"));
  o.lt = DecisionFrom(j.at("lt"));
  o.ft = DecisionFrom(j.at("ft"));
  o.router = DecisionFrom(j.at("router"));
  o.small_called = j.at("small_called").get<bool>();
  o.llm_called = j.at("llm_called").get<bool>();
  if (!j.at("y_small").is_null()) o.y_small = j["y_small"].get<std::string>();
  if (!j.at("y_llm").is_null()) o.y_llm = j["y_llm"].get<std::string>();
  o.failed = j.at("failed").get<bool>();
  if (!j.at("error").is_null()) o.error = j["error"].get<std::string>();
  return o;
}

void WriteTrace(std::ostream& out, const std::vector<PipelineOutcome>& outcomes) {
  for (const PipelineOutcome& o : outcomes) out << OutcomeToJson(o).dump() << '\n';
}

}  // namespace qcascade
