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

#ifndef QCASCADE_EDITS_H_
#define QCASCADE_EDITS_H_

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace qcascade {

// Granularity at which edits are extracted and scored.
enum class Level { kChar, kWord };

std::string_view LevelName(Level level);
Level ParseLevel(std::string_view name);  // "char" | "word", else DataError

enum class TokenScheme {
  kCodepoint,
  // Whitespace runs separate tokens; a token without any ASCII letter or
  // digit is further split into codepoints (unsegmented scripts, punctuation).
  kWhitespaceThenCodepoint,
};

TokenScheme SchemeFor(Level level);

using Units = std::vector<std::string>;

Units Tokenize(std::string_view text, TokenScheme scheme);

// Inverse of Tokenize up to whitespace normalization. Codepoint units are
// concatenated; under kWhitespaceThenCodepoint a single space is placed
// next to every unit that contains an ASCII letter or digit.
// Tokenize(Join(u, s), s) == u for every u produced by Tokenize(., s).
std::string Join(const Units& units, TokenScheme scheme);

// Replace source units [start, end) with `replacement`.
struct Edit {
  size_t start = 0;
  size_t end = 0;
  Units replacement;

  bool is_insertion() const { return start == end; }
  friend auto operator<=>(const Edit&, const Edit&) = default;
};

struct EditSet {
  Level level = Level::kChar;
  std::vector<Edit> edits;  // sorted, non-overlapping

  size_t size() const { return edits.size(); }
  bool empty() const { return edits.empty(); }
  friend bool operator==(const EditSet&, const EditSet&) = default;
};

enum class AlignOp { kMatch, kSubstitute, kDelete, kInsert };

// A minimal-cost unit Levenshtein alignment, before any merging.
struct Alignment {
  std::vector<AlignOp> ops;
  size_t cost = 0;
};

// Backtrace tie-break order: match, substitute, delete, insert.
Alignment Align(const Units& source, const Units& target);

// Merges maximal runs of non-match operations into span edits.
EditSet MergeAlignment(const Alignment& alignment, const Units& target,
                       Level level);

EditSet ExtractEdits(const Units& source, const Units& target, Level level);
EditSet ExtractEdits(std::string_view source, std::string_view target,
                     Level level);

// Throws DataError on an out-of-range span, an edit that changes nothing,
// or overlapping / unsorted edits.
Units ApplyEdits(const Units& source, const EditSet& edit_set);
std::string ApplyEdits(std::string_view source, const EditSet& edit_set);

// M2-like edit file: "S <source>", one "A <start> <end>|||<replacement>"
// line per edit, blank line between blocks.
struct M2Block {
  std::string source;
  EditSet edit_set;
};

void WriteM2Block(std::ostream& out, std::string_view source,
                  const EditSet& edit_set);
std::vector<M2Block> ReadM2(std::istream& in, Level level);

}  // namespace qcascade

#endif  // QCASCADE_EDITS_H_
