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

#ifndef QCASCADE_LABELS_H_
#define QCASCADE_LABELS_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qcascade/corpus.h"
#include "qcascade/scorer.h"
#include "qcascade/trigger.h"

namespace qcascade {

// A corpus pair together with what both correctors made of its source.
struct CorrectionRecord {
  ParallelPair pair;
  std::string y_small;
  std::string y_llm;
};

enum class CorrectorSide { kSmall, kLlm };

// Hypothesis edits source->y_side scored against source->target.
EditIndicators IndicatorsFor(const CorrectionRecord& record, CorrectorSide side,
                             Level level = Level::kChar);

// "The small model cannot correct it but the LLM can", evaluated at char
// level as (TP_S == 0 && TP_L > 0) || (FP_S > 0 && FP_L == 0) ||
// (FN_S > 0 && FN_L == 0).
bool IsLtPositive(const CorrectionRecord& record);

// Neither corrector made a correct edit on an erroneous pair.
bool IsFtPositive(const CorrectionRecord& record);

struct LabeledExample {
  std::string x;
  std::optional<std::string> y_context;  // absent for CT
  int label = 0;
  TriggerKind origin = TriggerKind::kCT;

  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

struct LabelSet {
  std::vector<LabeledExample> examples;
  size_t positives = 0;
  size_t negatives = 0;
  std::vector<std::string> warnings;
};

// One example per pair; label 1 iff the source is erroneous.
LabelSet BuildCt(const std::vector<ParallelPair>& corpus);

// Positives plus min(#positives, #non-positives) negatives drawn without
// replacement. Records are ordered by id before sampling and examples are
// emitted in id order. Zero positives yields an empty set and a warning.
LabelSet BuildLt(const std::vector<CorrectionRecord>& records, uint64_t seed);

// As BuildLt, restricted to erroneous pairs. The context is the output the
// cascade would have produced: y_llm when the record is LT-positive, else
// y_small.
LabelSet BuildFt(const std::vector<CorrectionRecord>& records, uint64_t seed);

// JSONL {"x", "y_context": string|null, "label": 0|1, "origin"}.
void WriteLabels(std::ostream& out, const std::vector<LabeledExample>& examples);
std::vector<LabeledExample> ParseLabels(std::istream& in);
void SaveLabels(const std::filesystem::path& path,
                const std::vector<LabeledExample>& examples);
std::vector<LabeledExample> LoadLabels(const std::filesystem::path& path);

// Featurizes x (and y_context when present) for training.
std::vector<TrainingExample> ToTrainingExamples(
    const std::vector<LabeledExample>& examples,
    Eigen::Index dim = kDefaultFeatureDim);

}  // namespace qcascade

#endif  // QCASCADE_LABELS_H_
