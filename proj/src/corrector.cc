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

#include "qcascade/corrector.h"

#include <fstream>

#include "httplib.h"
#include "json.hpp"
#include "qcascade/errors.h"
#include "qcascade/utf8.h"

namespace qcascade {
namespace {

using nlohmann::json;

template <typename Fn>
void ForEachJsonLine(const std::filesystem::path& path, Fn fn) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    try {
      fn(json::parse(line));
    } catch (const std::exception& e) {
      throw DataError(path.string() + ": line " + std::to_string(line_no) +
                      ": " + e.what());
    }
  }
}

}  // namespace

std::string_view CostClassName(CostClass cost) {
  return cost == CostClass::kSmall ? "small" : "llm";
}

Correction IdentityCorrector::Correct(std::string_view query,
                                      std::optional<std::string_view>) const {
  return {std::string(query), confidence_};
}

RuleCorrector::RuleCorrector(std::string name, CostClass cost,
                             std::map<std::string, std::string, std::less<>> rules,
                             double matched_confidence,
                             double default_confidence)
    : name_(std::move(name)),
      cost_(cost),
      rules_(std::move(rules)),
      matched_confidence_(matched_confidence),
      default_confidence_(default_confidence) {}

std::map<std::string, std::string, std::less<>> RuleCorrector::LoadRules(
    const std::filesystem::path& path) {
  std::map<std::string, std::string, std::less<>> rules;
  ForEachJsonLine(path, [&](const json& j) {
    rules[j.at("from").get<std::string>()] = j.at("to").get<std::string>();
  });
  return rules;
}

Correction RuleCorrector::Correct(std::string_view query,
                                  std::optional<std::string_view>) const {
  const auto it = rules_.find(query);
  if (it == rules_.end()) return {std::string(query), default_confidence_};
  return {it->second, matched_confidence_};
}

std::string_view ScriptedBehaviorName(ScriptedBehavior b) {
  switch (b) {
    case ScriptedBehavior::kPerfect: return "perfect";
    case ScriptedBehavior::kNoop: return "noop";
    case ScriptedBehavior::kCorrupt: return "corrupt";
  }
  return "?";
}

ScriptedBehavior ParseScriptedBehavior(std::string_view name) {
  for (auto b : {ScriptedBehavior::kPerfect, ScriptedBehavior::kNoop,
                 ScriptedBehavior::kCorrupt}) {
    if (ScriptedBehaviorName(b) == name) return b;
  }
  throw DataError("unknown scripted behavior '" + std::string(name) + "'");
}

std::string ScriptedOracleCorrector::DefaultCorruption(const ParallelPair& pair) {
  std::string out = pair.source + "#";
  while (out == pair.target) out += "#";
  return out;
}

ScriptedOracleCorrector::ScriptedOracleCorrector(
    std::string name, CostClass cost, const std::vector<ParallelPair>& corpus,
    const std::map<std::string, ScriptEntry>& script, ConfidenceRule confidence)
    : name_(std::move(name)), cost_(cost) {
  for (const ParallelPair& pair : corpus) {
    const auto it = script.find(pair.id);
    if (it == script.end()) {
      throw DataError(name_ + ": no scripted behavior for id '" + pair.id + "'");
    }
    Correction c;
    switch (it->second.behavior) {
      case ScriptedBehavior::kPerfect:
        c = {pair.target, confidence.perfect};
        break;
      case ScriptedBehavior::kNoop:
        c = {pair.source, confidence.noop};
        break;
      case ScriptedBehavior::kCorrupt:
        c = {it->second.output.value_or(DefaultCorruption(pair)),
             confidence.corrupt};
        if (c.corrected == pair.source || c.corrected == pair.target ||
            utf8::Trim(c.corrected).empty()) {
          throw DataError(name_ + ": corrupt output for '" + pair.id +
                          "' must differ from source and target");
        }
        break;
    }
    const auto [slot, inserted] = by_source_.emplace(pair.source, c);
    if (!inserted && slot->second.corrected != c.corrected) {
      throw DataError(name_ + ": conflicting scripts for source '" +
                      pair.source + "'");
    }
  }
}

std::map<std::string, ScriptEntry> ScriptedOracleCorrector::LoadScript(
    const std::filesystem::path& path) {
  std::map<std::string, ScriptEntry> script;
  ForEachJsonLine(path, [&](const json& j) {
    ScriptEntry entry;
    entry.behavior = ParseScriptedBehavior(j.at("behavior").get<std::string>());
    if (j.contains("output") && !j["output"].is_null()) {
      entry.output = j["output"].get<std::string>();
    }
    script[j.at("id").get<std::string>()] = std::move(entry);
  });
  return script;
}

Correction ScriptedOracleCorrector::Correct(
    std::string_view query, std::optional<std::string_view>) const {
  const auto it = by_source_.find(std::string(query));
  if (it == by_source_.end()) {
    throw CorrectorError(name_ + ": query is not scripted: '" +
                         std::string(query) + "'");
  }
  return it->second;
}

RemoteCorrector::RemoteCorrector(std::string name, CostClass cost,
                                 std::string base_url,
                                 std::chrono::milliseconds timeout)
    : name_(std::move(name)), cost_(cost), timeout_(timeout) {
  const size_t scheme_end = base_url.find("://");
  const size_t path_begin = base_url.find(
      '/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  scheme_host_port_ = base_url.substr(0, path_begin);
  path_ = path_begin == std::string::npos ? "" : base_url.substr(path_begin);
  while (!path_.empty() && path_.back() == '/') path_.pop_back();
  path_ += "/correct";
  if (scheme_host_port_.rfind("http://", 0) != 0) {
    throw ConfigError("remote corrector url must start with http://: " + base_url);
  }
}

Correction RemoteCorrector::Correct(std::string_view query,
                                    std::optional<std::string_view> hint) const {
  httplib::Client client(scheme_host_port_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs =
      std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  auto res = client.Post(path_, EncodeCorrectRequest(query, hint),
                         "application/json");
  if (!res) {
    throw CorrectorError(name_ + ": request failed: " +
                         httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw CorrectorError(name_ + ": HTTP " + std::to_string(res->status));
  }
  try {
    return DecodeCorrectResponse(res->body);
  } catch (const CorrectorError& e) {
    throw CorrectorError(name_ + ": " + e.what());
  }
}

std::string EncodeCorrectRequest(std::string_view query,
                                 std::optional<std::string_view> hint) {
  json j;
  j["query"] = std::string(query);
  j["hint"] = hint ? json(std::string(*hint)) : json();
  return j.dump();
}

Correction DecodeCorrectResponse(std::string_view body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception&) {
    throw CorrectorError("response body is not JSON");
  }
  if (!j.is_object() || !j.contains("corrected") || !j["corrected"].is_string() ||
      !j.contains("confidence") || !j["confidence"].is_number()) {
    throw CorrectorError("response lacks corrected/confidence");
  }
  Correction c{j["corrected"].get<std::string>(), j["confidence"].get<double>()};
  if (c.corrected.empty()) throw CorrectorError("empty correction");
  if (!(c.confidence >= 0.0 && c.confidence <= 1.0)) {
    throw CorrectorError("confidence outside [0, 1]");
  }
  return c;
}

}  // namespace qcascade
