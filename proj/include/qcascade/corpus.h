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

#ifndef QCASCADE_CORPUS_H_
#define QCASCADE_CORPUS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace qcascade {

// An original query with its gold correction. The two may differ in length.
struct ParallelPair {
  std::string id;
  std::string source;
  std::string target;

  bool erroneous() const { return source != target; }
  friend bool operator==(const ParallelPair&, const ParallelPair&) = default;
};

// Reads JSONL {"id", "source", "target"}. Errors name the 1-based line.
std::vector<ParallelPair> ParseCorpus(std::istream& in);
std::vector<ParallelPair> LoadCorpus(const std::filesystem::path& path);
void WriteCorpus(std::ostream& out, const std::vector<ParallelPair>& pairs);
void SaveCorpus(const std::filesystem::path& path,
                const std::vector<ParallelPair>& pairs);

// Character -> confusable replacements (homophones, near-sound characters).
struct ConfusionTable {
  std::map<std::string, std::vector<std::string>> entries;

  bool empty() const { return entries.empty(); }
  // Throws DataError on multi-codepoint keys, empty lists, or an entry that
  // only maps a character to itself.
  void Validate() const;
};

// JSONL {"char": "x", "confusions": ["y", ...]}.
ConfusionTable ParseConfusionTable(std::istream& in);
ConfusionTable LoadConfusionTable(const std::filesystem::path& path);

enum class NoiseOp {
  kConfusionSubstitution = 0,
  kAdjacentTransposition = 1,
  kRandomInsertion = 2,
  kRandomDeletion = 3,
};

inline constexpr size_t kNumNoiseOps = 4;

std::string_view NoiseOpName(NoiseOp op);
NoiseOp ParseNoiseOp(std::string_view name);

struct NoiseConfig {
  uint64_t seed = 0;
  double error_rate = 0.0;
  // Indexed by NoiseOp.
  std::array<double, kNumNoiseOps> op_weights{1.0, 1.0, 1.0, 1.0};

  double weight(NoiseOp op) const {
    return op_weights[static_cast<size_t>(op)];
  }
  void Validate() const;  // ConfigError on violation
};

// Applies one operation at codepoint `position`. `unit` is the substituted
// character for kConfusionSubstitution and the inserted character for
// kRandomInsertion; it is ignored otherwise. Transposition swaps `position`
// and `position + 1`. Insertion positions range over [0, length].
std::string ApplyNoiseOp(std::string_view clean, NoiseOp op, size_t position,
                         std::string_view unit = {});

// Corrupts exactly round(error_rate * N) queries with one operation each.
// Pair ids are "q<index>" in input order; target is always the clean text.
std::vector<ParallelPair> InjectNoise(const std::vector<std::string>& clean,
                                      const ConfusionTable& table,
                                      const NoiseConfig& cfg);

struct CorpusStats {
  size_t count = 0;
  double avg_source_length = 0.0;  // in codepoints
  double error_rate = 0.0;
};

CorpusStats ComputeCorpusStats(const std::vector<ParallelPair>& pairs);

}  // namespace qcascade

#endif  // QCASCADE_CORPUS_H_
