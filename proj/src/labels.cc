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

#include "qcascade/labels.h"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>

#include "json.hpp"
#include "qcascade/errors.h"

namespace qcascade {
namespace {

using Predicate = bool (*)(const CorrectionRecord&);

std::vector<const CorrectionRecord*> SortedById(
    const std::vector<CorrectionRecord>& records, bool erroneous_only) {
  std::vector<const CorrectionRecord*> sorted;
  for (const CorrectionRecord& r : records) {
    if (!erroneous_only || r.pair.erroneous()) sorted.push_back(&r);
  }
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto* a, const auto* b) { return a->pair.id < b->pair.id; });
  return sorted;
}

template <typename ContextFn>
LabelSet BuildBalanced(const std::vector<const CorrectionRecord*>& candidates,
                       Predicate positive, TriggerKind origin, uint64_t seed,
                       ContextFn context) {
  std::vector<bool> is_positive(candidates.size());
  std::vector<size_t> non_positive;
  size_t n_pos = 0;
  for (size_t i = 0; i < candidates.size(); ++i) {
    is_positive[i] = positive(*candidates[i]);
    if (is_positive[i]) {
      ++n_pos;
    } else {
      non_positive.push_back(i);
    }
  }

  LabelSet set;
  if (n_pos == 0) {
    set.warnings.push_back(std::string(TriggerKindName(origin)) +
                           ": no positive records, label set is empty");
    return set;
  }
  std::mt19937_64 rng(seed);
  std::shuffle(non_positive.begin(), non_positive.end(), rng);
  non_positive.resize(std::min(n_pos, non_positive.size()));
  std::vector<bool> take_negative(candidates.size(), false);
  for (size_t i : non_positive) take_negative[i] = true;

  for (size_t i = 0; i < candidates.size(); ++i) {
    if (!is_positive[i] && !take_negative[i]) continue;
    const CorrectionRecord& r = *candidates[i];
    set.examples.push_back({r.pair.source, context(r), is_positive[i] ? 1 : 0, origin});
  }
  set.positives = n_pos;
  set.negatives = non_positive.size();
  return set;
}

}  // namespace

EditIndicators IndicatorsFor(const CorrectionRecord& record, CorrectorSide side,
                             Level level) {
  const std::string& hyp =
      side == CorrectorSide::kSmall ? record.y_small : record.y_llm;
  return CompareEdits(ExtractEdits(record.pair.source, hyp, level),
                      ExtractEdits(record.pair.source, record.pair.target, level));
}

bool IsLtPositive(const CorrectionRecord& record) {
  const EditIndicators s = IndicatorsFor(record, CorrectorSide::kSmall);
  const EditIndicators l = IndicatorsFor(record, CorrectorSide::kLlm);
  return (s.tp == 0 && l.tp > 0) || (s.fp > 0 && l.fp == 0) ||
         (s.fn > 0 && l.fn == 0);
}

bool IsFtPositive(const CorrectionRecord& record) {
  if (!record.pair.erroneous()) return false;
  return IndicatorsFor(record, CorrectorSide::kSmall).tp == 0 &&
         IndicatorsFor(record, CorrectorSide::kLlm).tp == 0;
}

LabelSet BuildCt(const std::vector<ParallelPair>& corpus) {
  LabelSet set;
  for (const ParallelPair& p : corpus) {
    const int label = p.erroneous() ? 1 : 0;
    set.examples.push_back({p.source, std::nullopt, label, TriggerKind::kCT});
    (label == 1 ? set.positives : set.negatives) += 1;
  }
  return set;
}

LabelSet BuildLt(const std::vector<CorrectionRecord>& records, uint64_t seed) {
  return BuildBalanced(SortedById(records, false), &IsLtPositive,
                       TriggerKind::kLT, seed,
                       [](const CorrectionRecord& r) { return r.y_small; });
}

LabelSet BuildFt(const std::vector<CorrectionRecord>& records, uint64_t seed) {
  return BuildBalanced(SortedById(records, true), &IsFtPositive,
                       TriggerKind::kFT, seed, [](const CorrectionRecord& r) {
                         return IsLtPositive(r) ? r.y_llm : r.y_small;
                       });
}

void WriteLabels(std::ostream& out, const std::vector<LabeledExample>& examples) {
  for (const LabeledExample& ex : examples) {
    nlohmann::json j;
    j["x"] = ex.x;
    j["y_context"] = ex.y_context ? nlohmann::json(*ex.y_context) : nlohmann::json();
    j["label"] = ex.label;
    j["origin"] = TriggerKindName(ex.origin);
    out << j.dump() << '\n';
  }
}

std::vector<LabeledExample> ParseLabels(std::istream& in) {
  std::vector<LabeledExample> examples;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    try {
      const auto j = nlohmann::json::parse(line);
      LabeledExample ex;
      ex.x = j.at("x").get<std::string>();
      const auto& ctx = j.at("y_context");
      if (!ctx.is_null()) ex.y_context = ctx.get<std::string>();
      ex.label = j.at("label").get<int>();
      ex.origin = ParseTriggerKind(j.at("origin").get<std::string>());
      if (ex.label != 0 && ex.label != 1) throw DataError("label must be 0 or 1");
      if ((ex.origin == TriggerKind::kCT) == ex.y_context.has_value()) {
        throw DataError("CT examples take no context; LT/FT examples need one");
      }
      examples.push_back(std::move(ex));
    } catch (const std::exception& e) {
      throw DataError("label line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return examples;
}

void SaveLabels(const std::filesystem::path& path,
                const std::vector<LabeledExample>& examples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  WriteLabels(out, examples);
}

std::vector<LabeledExample> LoadLabels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return ParseLabels(in);
}

std::vector<TrainingExample> ToTrainingExamples(
    const std::vector<LabeledExample>& examples, Eigen::Index dim) {
  std::vector<TrainingExample> out;
  out.reserve(examples.size());
  for (const LabeledExample& ex : examples) {
    std::optional<std::string_view> ctx;
    if (ex.y_context) ctx = *ex.y_context;
    out.push_back({Featurize(ex.x, ctx, dim), ex.label});
  }
  return out;
}

}  // namespace qcascade
