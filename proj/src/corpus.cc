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

#include "qcascade/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "qcascade/errors.h"
#include "qcascade/utf8.h"

namespace qcascade {
namespace {

using nlohmann::json;

std::string LinePrefix(size_t line_no) {
  return "line " + std::to_string(line_no) + ": ";
}

std::string RequireString(const json& record, const char* field,
                          size_t line_no) {
  const auto it = record.find(field);
  if (it == record.end()) {
    throw DataError("schema error: " + LinePrefix(line_no) + "missing field '" +
                    field + "'");
  }
  if (!it->is_string()) {
    throw DataError("schema error: " + LinePrefix(line_no) + "field '" +
                    field + "' is not a string");
  }
  return it->get<std::string>();
}

json ParseLine(const std::string& line, size_t line_no) {
  try {
    json record = json::parse(line);
    if (!record.is_object()) throw DataError("");
    return record;
  } catch (const std::exception&) {
    throw DataError("parse error: " + LinePrefix(line_no) +
                    "not a JSON object");
  }
}

std::ifstream OpenForRead(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

}  // namespace

std::vector<ParallelPair> ParseCorpus(std::istream& in) {
  std::vector<ParallelPair> pairs;
  std::unordered_set<std::string> seen;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const json record = ParseLine(line, line_no);
    ParallelPair pair{RequireString(record, "id", line_no),
                      RequireString(record, "source", line_no),
                      RequireString(record, "target", line_no)};
    if (utf8::Trim(pair.source).empty() || utf8::Trim(pair.target).empty()) {
      throw DataError("schema error: " + LinePrefix(line_no) +
                      "source and target must be non-empty");
    }
    if (!seen.insert(pair.id).second) {
      throw DataError(LinePrefix(line_no) + "duplicate id '" + pair.id + "'");
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

std::vector<ParallelPair> LoadCorpus(const std::filesystem::path& path) {
  std::ifstream in = OpenForRead(path);
  try {
    return ParseCorpus(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void WriteCorpus(std::ostream& out, const std::vector<ParallelPair>& pairs) {
  for (const ParallelPair& p : pairs) {
    json record = {{"id", p.id}, {"source", p.source}, {"target", p.target}};
    out << record.dump() << '\n';
  }
}

void SaveCorpus(const std::filesystem::path& path,
                const std::vector<ParallelPair>& pairs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  WriteCorpus(out, pairs);
}

void ConfusionTable::Validate() const {
  for (const auto& [ch, confusions] : entries) {
    if (!utf8::IsSingleCodepoint(ch)) {
      throw DataError("confusion key '" + ch + "' is not a single character");
    }
    if (confusions.empty()) {
      throw DataError("confusion list for '" + ch + "' is empty");
    }
    const bool only_self = std::all_of(confusions.begin(), confusions.end(),
                                       [&](const auto& c) { return c == ch; });
    if (only_self) {
      throw DataError("confusion list for '" + ch + "' only contains itself");
    }
  }
}

ConfusionTable ParseConfusionTable(std::istream& in) {
  ConfusionTable table;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const json record = ParseLine(line, line_no);
    const std::string ch = RequireString(record, "char", line_no);
    const auto it = record.find("confusions");
    if (it == record.end() || !it->is_array()) {
      throw DataError("schema error: " + LinePrefix(line_no) +
                      "missing array field 'confusions'");
    }
    auto& list = table.entries[ch];
    for (const json& c : *it) {
      if (!c.is_string()) {
        throw DataError("schema error: " + LinePrefix(line_no) +
                        "confusions must be strings");
      }
      list.push_back(c.get<std::string>());
    }
  }
  table.Validate();
  return table;
}

ConfusionTable LoadConfusionTable(const std::filesystem::path& path) {
  std::ifstream in = OpenForRead(path);
  return ParseConfusionTable(in);
}

std::string_view NoiseOpName(NoiseOp op) {
  switch (op) {
    case NoiseOp::kConfusionSubstitution: return "confusion_substitution";
    case NoiseOp::kAdjacentTransposition: return "adjacent_transposition";
    case NoiseOp::kRandomInsertion: return "random_insertion";
    case NoiseOp::kRandomDeletion: return "random_deletion";
  }
  return "?";
}

NoiseOp ParseNoiseOp(std::string_view name) {
  for (size_t k = 0; k < kNumNoiseOps; ++k) {
    const auto op = static_cast<NoiseOp>(k);
    if (NoiseOpName(op) == name) return op;
  }
  throw ConfigError("unknown noise operation '" + std::string(name) + "'");
}

void NoiseConfig::Validate() const {
  if (!(error_rate >= 0.0 && error_rate <= 1.0)) {
    throw ConfigError("error_rate must be in [0, 1]");
  }
  double total = 0.0;
  for (double w : op_weights) {
    if (!(w >= 0.0)) throw ConfigError("op_weights must be non-negative");
    total += w;
  }
  if (!(total > 0.0)) throw ConfigError("op_weights must sum to a positive value");
}

std::string ApplyNoiseOp(std::string_view clean, NoiseOp op, size_t position,
                         std::string_view unit) {
  std::vector<std::string> units = utf8::Codepoints(clean);
  const size_t n = units.size();
  switch (op) {
    case NoiseOp::kConfusionSubstitution:
      if (position >= n) throw DataError("substitution position out of range");
      units[position] = std::string(unit);
      break;
    case NoiseOp::kAdjacentTransposition:
      if (position + 1 >= n) throw DataError("transposition position out of range");
      std::swap(units[position], units[position + 1]);
      break;
    case NoiseOp::kRandomInsertion:
      if (position > n) throw DataError("insertion position out of range");
      units.insert(units.begin() + static_cast<std::ptrdiff_t>(position),
                   std::string(unit));
      break;
    case NoiseOp::kRandomDeletion:
      if (position >= n) throw DataError("deletion position out of range");
      units.erase(units.begin() + static_cast<std::ptrdiff_t>(position));
      break;
  }
  std::string out;
  for (const auto& u : units) out += u;
  return out;
}

namespace {

bool IsSpaceUnit(const std::string& u) {
  return u.size() == 1 && utf8::Trim(u).empty();
}

size_t UniformIndex(std::mt19937_64& rng, size_t n) {
  return std::uniform_int_distribution<size_t>(0, n - 1)(rng);
}

// One corruption of `clean`. Operations that cannot change a query fall
// back to insertion, which always can.
std::string CorruptQuery(const std::string& clean, const ConfusionTable& table,
                         const std::vector<std::string>& inventory,
                         NoiseOp op, std::mt19937_64& rng) {
  const std::vector<std::string> units = utf8::Codepoints(clean);
  const size_t n = units.size();

  if (op == NoiseOp::kConfusionSubstitution) {
    std::vector<size_t> positions;
    for (size_t p = 0; p < n; ++p) {
      const auto it = table.entries.find(units[p]);
      if (it != table.entries.end()) positions.push_back(p);
    }
    if (!positions.empty()) {
      const size_t p = positions[UniformIndex(rng, positions.size())];
      std::vector<std::string> options;
      for (const auto& c : table.entries.at(units[p])) {
        if (c != units[p]) options.push_back(c);
      }
      return ApplyNoiseOp(clean, op, p, options[UniformIndex(rng, options.size())]);
    }
  } else if (op == NoiseOp::kAdjacentTransposition) {
    std::vector<size_t> positions;
    for (size_t p = 0; p + 1 < n; ++p) {
      if (units[p] != units[p + 1]) positions.push_back(p);
    }
    if (!positions.empty()) {
      return ApplyNoiseOp(clean, op, positions[UniformIndex(rng, positions.size())]);
    }
  } else if (op == NoiseOp::kRandomDeletion && n >= 2) {
    std::string out = ApplyNoiseOp(clean, op, UniformIndex(rng, n));
    if (!utf8::Trim(out).empty()) return out;
  }

  const size_t p = UniformIndex(rng, n + 1);
  return ApplyNoiseOp(clean, NoiseOp::kRandomInsertion, p,
                      inventory[UniformIndex(rng, inventory.size())]);
}

}  // namespace

std::vector<ParallelPair> InjectNoise(const std::vector<std::string>& clean,
                                      const ConfusionTable& table,
                                      const NoiseConfig& cfg) {
  cfg.Validate();
  if (cfg.weight(NoiseOp::kConfusionSubstitution) > 0.0 && table.empty()) {
    throw ConfigError("confusion_substitution has positive weight but the "
                      "confusion table is empty");
  }
  std::set<std::string> inventory_set;
  for (size_t i = 0; i < clean.size(); ++i) {
    if (utf8::Trim(clean[i]).empty()) {
      throw DataError("clean query " + std::to_string(i) + " is empty");
    }
    for (auto& u : utf8::Codepoints(clean[i])) {
      if (!IsSpaceUnit(u)) inventory_set.insert(std::move(u));
    }
  }
  const std::vector<std::string> inventory(inventory_set.begin(),
                                           inventory_set.end());

  std::mt19937_64 rng(cfg.seed);
  const size_t n = clean.size();
  const auto n_corrupt = static_cast<size_t>(
      std::llround(cfg.error_rate * static_cast<double>(n)));
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<bool> corrupt(n, false);
  for (size_t k = 0; k < n_corrupt; ++k) corrupt[order[k]] = true;

  std::discrete_distribution<size_t> pick_op(cfg.op_weights.begin(),
                                             cfg.op_weights.end());
  std::vector<ParallelPair> pairs;
  pairs.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    ParallelPair pair{"q" + std::to_string(i), clean[i], clean[i]};
    if (corrupt[i]) {
      const auto op = static_cast<NoiseOp>(pick_op(rng));
      pair.source = CorruptQuery(clean[i], table, inventory, op, rng);
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

CorpusStats ComputeCorpusStats(const std::vector<ParallelPair>& pairs) {
  if (pairs.empty()) throw DataError("corpus statistics need at least one pair");
  CorpusStats stats;
  stats.count = pairs.size();
  size_t total_len = 0;
  size_t erroneous = 0;
  for (const ParallelPair& p : pairs) {
    total_len += utf8::Length(p.source);
    if (p.erroneous()) ++erroneous;
  }
  stats.avg_source_length =
      static_cast<double>(total_len) / static_cast<double>(stats.count);
  stats.error_rate =
      static_cast<double>(erroneous) / static_cast<double>(stats.count);
  return stats;
}

}  // namespace qcascade
