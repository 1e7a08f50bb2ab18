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

#ifndef QCASCADE_SCORER_H_
#define QCASCADE_SCORER_H_

#include <string>
#include <vector>

#include "qcascade/edits.h"

namespace qcascade {

// Per-query (or summed) edit counts at one granularity.
struct EditIndicators {
  Level level = Level::kChar;
  long tp = 0;
  long fp = 0;
  long fn = 0;

  EditIndicators& operator+=(const EditIndicators& other);
  friend bool operator==(const EditIndicators&, const EditIndicators&) = default;
};

struct PRFReport {
  double precision = 0.0;
  double recall = 0.0;
  double f_beta = 0.0;
  double beta = 0.5;
};

// Exact (start, end, replacement) matching. Throws DataError when the two
// sets were extracted at different levels.
EditIndicators CompareEdits(const EditSet& hypothesis, const EditSet& reference);

// Zero denominators yield 0 for the affected quantity.
PRFReport Prf(const EditIndicators& ind, double beta = 0.5);

struct ScoreRecord {
  std::string source;
  std::string hypothesis;
  std::string reference;
};

// Indicators for one record at one level.
EditIndicators ScoreRecordAt(const ScoreRecord& record, Level level);

struct CorpusScore {
  EditIndicators char_counts{Level::kChar};
  EditIndicators word_counts{Level::kWord};
  PRFReport char_prf;
  PRFReport word_prf;
  size_t n_records = 0;
};

// Micro-aggregated over records. Throws DataError on an empty list.
CorpusScore ScoreCorpus(const std::vector<ScoreRecord>& records,
                        double beta = 0.5);

}  // namespace qcascade

#endif  // QCASCADE_SCORER_H_
