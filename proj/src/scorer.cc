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

#include "qcascade/scorer.h"

#include <algorithm>

#include "qcascade/errors.h"

namespace qcascade {

EditIndicators& EditIndicators::operator+=(const EditIndicators& other) {
  tp += other.tp;
  fp += other.fp;
  fn += other.fn;
  return *this;
}

EditIndicators CompareEdits(const EditSet& hypothesis,
                            const EditSet& reference) {
  if (hypothesis.level != reference.level) {
    throw DataError("cannot compare " +
                    std::string(LevelName(hypothesis.level)) + " edits with " +
                    std::string(LevelName(reference.level)) + " edits");
  }
  EditIndicators ind{hypothesis.level};
  for (const Edit& h : hypothesis.edits) {
    // Both lists are sorted, but they are short; a linear probe is enough.
    if (std::find(reference.edits.begin(), reference.edits.end(), h) !=
        reference.edits.end()) {
      ++ind.tp;
    }
  }
  ind.fp = static_cast<long>(hypothesis.size()) - ind.tp;
  ind.fn = static_cast<long>(reference.size()) - ind.tp;
  return ind;
}

PRFReport Prf(const EditIndicators& ind, double beta) {
  PRFReport r;
  r.beta = beta;
  const long proposed = ind.tp + ind.fp;
  const long gold = ind.tp + ind.fn;
  r.precision = proposed > 0 ? static_cast<double>(ind.tp) / proposed : 0.0;
  r.recall = gold > 0 ? static_cast<double>(ind.tp) / gold : 0.0;
  const double b2 = beta * beta;
  const double denom = b2 * r.precision + r.recall;
  r.f_beta = denom > 0.0 ? (1.0 + b2) * r.precision * r.recall / denom : 0.0;
  return r;
}

EditIndicators ScoreRecordAt(const ScoreRecord& record, Level level) {
  return CompareEdits(ExtractEdits(record.source, record.hypothesis, level),
                      ExtractEdits(record.source, record.reference, level));
}

CorpusScore ScoreCorpus(const std::vector<ScoreRecord>& records, double beta) {
  if (records.empty()) throw DataError("cannot score an empty record list");
  CorpusScore score;
  for (const ScoreRecord& rec : records) {
    score.char_counts += ScoreRecordAt(rec, Level::kChar);
    score.word_counts += ScoreRecordAt(rec, Level::kWord);
  }
  score.char_prf = Prf(score.char_counts, beta);
  score.word_prf = Prf(score.word_counts, beta);
  score.n_records = records.size();
  return score;
}

}  // namespace qcascade
