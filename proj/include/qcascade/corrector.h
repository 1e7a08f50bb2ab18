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

#ifndef QCASCADE_CORRECTOR_H_
#define QCASCADE_CORRECTOR_H_

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qcascade/corpus.h"

namespace qcascade {

enum class CostClass { kSmall, kLlm };

std::string_view CostClassName(CostClass cost);

struct Correction {
  std::string corrected;
  double confidence = 0.0;  // [0, 1]
};

// A query corrector. Implementations must be safe to call concurrently and
// deterministic per (query, hint) when used with the mock backends.
// Failures are reported by throwing CorrectorError.
class Corrector {
 public:
  virtual ~Corrector() = default;

  virtual Correction Correct(std::string_view query,
                             std::optional<std::string_view> hint) const = 0;
  virtual std::string_view name() const = 0;
  virtual CostClass cost_class() const = 0;
};

// Echoes the query.
class IdentityCorrector final : public Corrector {
 public:
  IdentityCorrector(std::string name, CostClass cost, double confidence = 0.5)
      : name_(std::move(name)), cost_(cost), confidence_(confidence) {}

  Correction Correct(std::string_view query,
                     std::optional<std::string_view> hint) const override;
  std::string_view name() const override { return name_; }
  CostClass cost_class() const override { return cost_; }

 private:
  std::string name_;
  CostClass cost_;
  double confidence_;
};

// Exact-match rewrite table; unmatched queries are echoed. Same behavior as
// the mock backend of the reference corrector service.
class RuleCorrector final : public Corrector {
 public:
  RuleCorrector(std::string name, CostClass cost,
                std::map<std::string, std::string, std::less<>> rules,
                double matched_confidence = 0.9,
                double default_confidence = 0.5);

  // JSONL {"from": ..., "to": ...}.
  static std::map<std::string, std::string, std::less<>> LoadRules(
      const std::filesystem::path& path);

  Correction Correct(std::string_view query,
                     std::optional<std::string_view> hint) const override;
  std::string_view name() const override { return name_; }
  CostClass cost_class() const override { return cost_; }

 private:
  std::string name_;
  CostClass cost_;
  std::map<std::string, std::string, std::less<>> rules_;
  double matched_confidence_;
  double default_confidence_;
};

enum class ScriptedBehavior { kPerfect, kNoop, kCorrupt };

std::string_view ScriptedBehaviorName(ScriptedBehavior b);
ScriptedBehavior ParseScriptedBehavior(std::string_view name);

struct ScriptEntry {
  ScriptedBehavior behavior = ScriptedBehavior::kNoop;
  std::optional<std::string> output;  // only for kCorrupt
};

struct ConfidenceRule {
  double perfect = 0.9;
  double noop = 0.4;
  double corrupt = 0.6;
};

// Emits the gold target, the source, or a scripted wrong string depending
// on the per-id behavior. Queries are recognized by their source text.
class ScriptedOracleCorrector final : public Corrector {
 public:
  // Throws DataError when a corpus id has no behavior, a corrupt output
  // equals the source or target, or two ids share a source but disagree.
  ScriptedOracleCorrector(std::string name, CostClass cost,
                          const std::vector<ParallelPair>& corpus,
                          const std::map<std::string, ScriptEntry>& script,
                          ConfidenceRule confidence = {});

  // JSONL {"id": ..., "behavior": "perfect"|"noop"|"corrupt", "output"?: ...}.
  static std::map<std::string, ScriptEntry> LoadScript(
      const std::filesystem::path& path);

  // Deterministic wrong string used for kCorrupt when no output is given.
  static std::string DefaultCorruption(const ParallelPair& pair);

  Correction Correct(std::string_view query,
                     std::optional<std::string_view> hint) const override;
  std::string_view name() const override { return name_; }
  CostClass cost_class() const override { return cost_; }

 private:
  std::string name_;
  CostClass cost_;
  std::unordered_map<std::string, Correction> by_source_;
};

// Client for the HTTP corrector protocol:
// POST <url>/correct {"query", "hint"} -> {"corrected", "confidence"}.
// Non-200 responses, transport errors and malformed bodies throw.
class RemoteCorrector final : public Corrector {
 public:
  RemoteCorrector(std::string name, CostClass cost, std::string base_url,
                  std::chrono::milliseconds timeout = std::chrono::seconds(10));

  Correction Correct(std::string_view query,
                     std::optional<std::string_view> hint) const override;
  std::string_view name() const override { return name_; }
  CostClass cost_class() const override { return cost_; }

 private:
  std::string name_;
  CostClass cost_;
  std::string scheme_host_port_;
  std::string path_;
  std::chrono::milliseconds timeout_;
};

// Protocol bodies, shared by the client and the test stubs.
std::string EncodeCorrectRequest(std::string_view query,
                                 std::optional<std::string_view> hint);
Correction DecodeCorrectResponse(std::string_view body);

}  // namespace qcascade

#endif  // QCASCADE_CORRECTOR_H_
