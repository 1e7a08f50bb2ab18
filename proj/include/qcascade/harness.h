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

#ifndef QCASCADE_HARNESS_H_
#define QCASCADE_HARNESS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "qcascade/corpus.h"
#include "qcascade/corrector.h"
#include "qcascade/labels.h"
#include "qcascade/pipeline.h"
#include "qcascade/policies.h"
#include "qcascade/scorer.h"
#include "qcascade/trigger.h"

namespace qcascade {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitData = 2,
  kExitRemoteBudget = 3,
};

// Raised by eval when more queries failed than `max_failure_rate` allows.
class FailureBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Command-line values that override the config file.
struct Overrides {
  std::optional<uint64_t> seed;
  std::optional<size_t> parallelism;
  std::optional<size_t> limit;
  std::optional<std::string> threshold_sweep;  // "start:stop:step"
};

struct CorrectorSpec {
  std::string type = "identity";  // identity | rules | scripted | remote
  std::filesystem::path path;      // rules or script file
  std::string url;
  int timeout_ms = 10000;
  ConfidenceRule confidence;
};

struct PolicySpec {
  std::string name;
  PolicyKind kind = PolicyKind::kTrigger3;
  double p = 0.0;
  double tau = 0.5;
  bool oracle_triggers = false;  // trigger3 only
};

struct GenCorpusSpec {
  std::filesystem::path clean_queries;
  std::optional<std::filesystem::path> confusion_table;
  NoiseConfig noise;
  std::map<std::string, double> split{{"train", 1.0}};
};

// JSON config file; relative paths resolve against the file's directory.
struct HarnessConfig {
  uint64_t seed = 0;
  size_t parallelism = 1;
  std::optional<size_t> limit;
  std::filesystem::path output_dir = "out";
  std::map<std::string, std::filesystem::path> corpus;  // train/valid/test
  std::optional<GenCorpusSpec> gen_corpus;
  CorrectorSpec small;
  CorrectorSpec llm;
  Eigen::Index feature_dim = kDefaultFeatureDim;
  TrainConfig train;
  std::array<double, 3> thresholds{0.5, 0.5, 0.5};  // CT, LT, FT
  std::vector<PolicySpec> policies;
  std::optional<std::vector<double>> threshold_sweep;
  double max_failure_rate = 0.0;

  static HarnessConfig FromJson(const nlohmann::json& j,
                                const std::filesystem::path& base_dir,
                                const Overrides& overrides = {});
  static HarnessConfig Load(const std::filesystem::path& path,
                            const Overrides& overrides = {});

  std::filesystem::path labels_dir() const { return output_dir / "labels"; }
  std::filesystem::path models_dir() const { return output_dir / "models"; }
  std::filesystem::path reports_dir() const { return output_dir / "reports"; }

  // Split path or ConfigError.
  const std::filesystem::path& split(const std::string& name) const;
};

// Inclusive "start:stop:step" grid; every value must lie in (0, 1).
std::vector<double> ParseThresholdSweep(std::string_view spec);

std::unique_ptr<Corrector> MakeCorrector(const CorrectorSpec& spec,
                                         std::string name, CostClass cost,
                                         const std::vector<ParallelPair>& corpus);

// Triggers that read the answer key: CT fires on erroneous queries, LT on
// LT-positive records (peeking at the LLM), FT when the candidate has no
// correct edit on an erroneous query.
struct OracleTriggers {
  std::shared_ptr<const Trigger> ct;
  std::shared_ptr<const Trigger> lt;
  std::shared_ptr<const Trigger> ft;
};

OracleTriggers MakeOracleTriggers(const std::vector<ParallelPair>& pairs,
                                  std::shared_ptr<const Corrector> llm_peek);

struct PolicyReport {
  std::string policy;
  PolicyKind kind = PolicyKind::kTrigger3;
  CorpusScore score;
  double llm_coverage = 0.0;
  size_t failed = 0;
};

PolicyReport Summarize(const std::string& name, PolicyKind kind,
                       const std::vector<ParallelPair>& pairs,
                       const std::vector<PipelineOutcome>& outcomes);

nlohmann::json ScoreToJson(const CorpusScore& score);
nlohmann::json PolicyReportToJson(const PolicyReport& report);
// Table with char/word P, R, F0.5 (x100), LLM coverage and failures.
std::string FormatReportTable(const std::vector<PolicyReport>& reports);

// Runs both correctors over `pairs`. Failed pairs are skipped and counted.
std::vector<CorrectionRecord> CollectCorrections(
    const std::vector<ParallelPair>& pairs, const CorrectorPair& correctors,
    size_t parallelism, size_t* failures);

void WriteRecords(const std::filesystem::path& path,
                  const std::vector<CorrectionRecord>& records);
std::vector<CorrectionRecord> LoadRecords(const std::filesystem::path& path);

// Subcommands. Progress and summaries go to `log`.
void CmdGenCorpus(const HarnessConfig& cfg, std::ostream& log);
void CmdExtractEdits(const std::filesystem::path& corpus,
                     const std::filesystem::path& output, Level level,
                     std::ostream& log);
nlohmann::json CmdScore(const std::filesystem::path& records, std::ostream& log);
void CmdBuildLabels(const HarnessConfig& cfg, std::ostream& log);
void CmdTrain(const HarnessConfig& cfg, std::ostream& log);
std::vector<PolicyReport> CmdEval(const HarnessConfig& cfg, std::ostream& log);
void CmdCompare(const std::vector<std::filesystem::path>& reports,
                std::ostream& out);

}  // namespace qcascade

#endif  // QCASCADE_HARNESS_H_
