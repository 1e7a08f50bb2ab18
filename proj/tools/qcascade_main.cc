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

// Command-line harness: corpus generation, edit extraction, scoring, label
// construction, trigger training, policy evaluation and report comparison.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qcascade/errors.h"
#include "qcascade/harness.h"

namespace {

using qcascade::ExitCode;

int Run(int argc, char** argv) {
  CLI::App app{"qcascade: large/small model query-correction cascade harness"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  qcascade::Overrides overrides;
  app.add_option("--config", config_path, "JSON harness config");
  app.add_option("--seed", overrides.seed, "global seed (overrides config)");
  app.add_option("--parallelism", overrides.parallelism, "worker threads, 0 = all cores");
  app.add_option("--limit", overrides.limit, "use only the first N queries of a split");
  app.add_option("--threshold-sweep", overrides.threshold_sweep,
                 "start:stop:step grid of trigger thresholds for eval");

  auto* gen = app.add_subcommand("gen-corpus", "inject noise into clean queries");
  auto* extract = app.add_subcommand("extract-edits", "write M2-style edits for a corpus");
  std::string corpus_path;
  std::string output_path;
  std::string level = "char";
  extract->add_option("--input", corpus_path, "corpus JSONL")->required();
  extract->add_option("--output", output_path, "M2 output file")->required();
  extract->add_option("--level", level, "char or word")
      ->check(CLI::IsMember({"char", "word"}));

  auto* score = app.add_subcommand("score", "score hypotheses against references");
  std::string records_path;
  std::string score_output;
  score->add_option("--input", records_path,
                    "JSONL of {source, hypothesis, reference}")->required();
  score->add_option("--output", score_output, "report JSON (default: stdout)");

  auto* labels = app.add_subcommand("build-labels", "build CT/LT/FT training sets");
  auto* train = app.add_subcommand("train-trigger", "train CT/LT/FT (and routers)");
  auto* eval = app.add_subcommand("eval", "run every configured policy on the test split");
  auto* compare = app.add_subcommand("compare", "tabulate one or more report files");
  std::vector<std::string> report_paths;
  compare->add_option("reports", report_paths, "report.json files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? qcascade::kExitOk : qcascade::kExitConfig;
  }

  auto load_config = [&] {
    if (config_path.empty()) throw qcascade::ConfigError("--config is required");
    return qcascade::HarnessConfig::Load(config_path, overrides);
  };

  if (*gen) {
    qcascade::CmdGenCorpus(load_config(), std::cout);
  } else if (*extract) {
    qcascade::CmdExtractEdits(corpus_path, output_path, qcascade::ParseLevel(level),
                              std::cerr);
  } else if (*score) {
    const auto report = qcascade::CmdScore(records_path, std::cerr);
    if (score_output.empty()) {
      std::cout << report.dump(2) << '\n';
    } else {
      std::ofstream out(score_output, std::ios::binary);
      if (!out) throw qcascade::DataError("cannot write " + score_output);
      out << report.dump(2) << '\n';
    }
  } else if (*labels) {
    qcascade::CmdBuildLabels(load_config(), std::cout);
  } else if (*train) {
    qcascade::CmdTrain(load_config(), std::cout);
  } else if (*eval) {
    qcascade::CmdEval(load_config(), std::cout);
  } else if (*compare) {
    std::vector<std::filesystem::path> paths(report_paths.begin(), report_paths.end());
    qcascade::CmdCompare(paths, std::cout);
  }
  return qcascade::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Run(argc, argv);
  } catch (const qcascade::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return qcascade::kExitConfig;
  } catch (const qcascade::FailureBudgetExceeded& e) {
    std::cerr << "corrector failures: " << e.what() << '\n';
    return qcascade::kExitRemoteBudget;
  } catch (const qcascade::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return qcascade::kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return qcascade::kExitData;
  }
}
