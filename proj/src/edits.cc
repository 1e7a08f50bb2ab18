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

#include "qcascade/edits.h"

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>

#include "qcascade/errors.h"
#include "qcascade/utf8.h"

namespace qcascade {
namespace {

bool IsAsciiSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool HasAsciiAlnum(std::string_view token) {
  return std::any_of(token.begin(), token.end(), [](char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
           (c >= 'A' && c <= 'Z');
  });
}

void CheckEditSet(size_t source_size, const Units& source,
                  const EditSet& edit_set) {
  const Edit* prev = nullptr;
  for (const Edit& e : edit_set.edits) {
    if (e.start > e.end || e.end > source_size) {
      throw DataError("edit span [" + std::to_string(e.start) + ", " +
                      std::to_string(e.end) + ") out of range for source of " +
                      std::to_string(source_size) + " units");
    }
    if (std::equal(source.begin() + e.start, source.begin() + e.end,
                   e.replacement.begin(), e.replacement.end())) {
      throw DataError("edit at " + std::to_string(e.start) +
                      " does not change the source");
    }
    if (prev != nullptr) {
      const bool overlaps = prev->end > e.start;
      const bool same_insertion_point =
          prev->is_insertion() && e.is_insertion() && prev->start == e.start;
      const bool unsorted = *prev > e;
      if (overlaps || same_insertion_point || unsorted) {
        throw DataError("overlapping edits at " + std::to_string(e.start));
      }
    }
    prev = &e;
  }
}

}  // namespace

std::string_view LevelName(Level level) {
  return level == Level::kChar ? "char" : "word";
}

Level ParseLevel(std::string_view name) {
  if (name == "char") return Level::kChar;
  if (name == "word") return Level::kWord;
  throw DataError("unknown level '" + std::string(name) + "'");
}

TokenScheme SchemeFor(Level level) {
  return level == Level::kChar ? TokenScheme::kCodepoint
                               : TokenScheme::kWhitespaceThenCodepoint;
}

Units Tokenize(std::string_view text, TokenScheme scheme) {
  if (scheme == TokenScheme::kCodepoint) return utf8::Codepoints(text);

  Units units;
  size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && IsAsciiSpace(text[pos])) ++pos;
    const size_t begin = pos;
    while (pos < text.size() && !IsAsciiSpace(text[pos])) ++pos;
    if (begin == pos) break;
    const std::string_view token = text.substr(begin, pos - begin);
    if (HasAsciiAlnum(token)) {
      units.emplace_back(token);
    } else {
      for (auto& cp : utf8::Codepoints(token)) units.push_back(std::move(cp));
    }
  }
  return units;
}

std::string Join(const Units& units, TokenScheme scheme) {
  std::string text;
  for (size_t i = 0; i < units.size(); ++i) {
    if (scheme == TokenScheme::kWhitespaceThenCodepoint && i > 0 &&
        (HasAsciiAlnum(units[i - 1]) || HasAsciiAlnum(units[i]))) {
      text.push_back(' ');
    }
    text += units[i];
  }
  return text;
}

Alignment Align(const Units& source, const Units& target) {
  const size_t n = source.size();
  const size_t m = target.size();
  // dist[i * (m + 1) + j] = distance between source[0, i) and target[0, j).
  std::vector<size_t> dist((n + 1) * (m + 1));
  auto at = [&](size_t i, size_t j) -> size_t& { return dist[i * (m + 1) + j]; };
  for (size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = 1; j <= m; ++j) {
      const size_t diag = at(i - 1, j - 1) + (source[i - 1] == target[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  Alignment alignment;
  alignment.cost = at(n, m);
  size_t i = n;
  size_t j = m;
  while (i > 0 || j > 0) {
    const size_t here = at(i, j);
    if (i > 0 && j > 0 && source[i - 1] == target[j - 1] &&
        at(i - 1, j - 1) == here) {
      alignment.ops.push_back(AlignOp::kMatch);
      --i, --j;
    } else if (i > 0 && j > 0 && at(i - 1, j - 1) + 1 == here) {
      alignment.ops.push_back(AlignOp::kSubstitute);
      --i, --j;
    } else if (i > 0 && at(i - 1, j) + 1 == here) {
      alignment.ops.push_back(AlignOp::kDelete);
      --i;
    } else {
      alignment.ops.push_back(AlignOp::kInsert);
      --j;
    }
  }
  std::reverse(alignment.ops.begin(), alignment.ops.end());
  return alignment;
}

EditSet MergeAlignment(const Alignment& alignment, const Units& target,
                       Level level) {
  EditSet result{level, {}};
  size_t i = 0;
  size_t j = 0;
  size_t k = 0;
  const auto& ops = alignment.ops;
  while (k < ops.size()) {
    if (ops[k] == AlignOp::kMatch) {
      ++i, ++j, ++k;
      continue;
    }
    Edit edit;
    edit.start = i;
    const size_t target_begin = j;
    for (; k < ops.size() && ops[k] != AlignOp::kMatch; ++k) {
      if (ops[k] != AlignOp::kInsert) ++i;
      if (ops[k] != AlignOp::kDelete) ++j;
    }
    edit.end = i;
    edit.replacement.assign(target.begin() + target_begin, target.begin() + j);
    result.edits.push_back(std::move(edit));
  }
  return result;
}

EditSet ExtractEdits(const Units& source, const Units& target, Level level) {
  return MergeAlignment(Align(source, target), target, level);
}

EditSet ExtractEdits(std::string_view source, std::string_view target,
                     Level level) {
  const TokenScheme scheme = SchemeFor(level);
  return ExtractEdits(Tokenize(source, scheme), Tokenize(target, scheme),
                      level);
}

Units ApplyEdits(const Units& source, const EditSet& edit_set) {
  CheckEditSet(source.size(), source, edit_set);
  Units out = source;
  for (auto it = edit_set.edits.rbegin(); it != edit_set.edits.rend(); ++it) {
    auto first = out.begin() + static_cast<std::ptrdiff_t>(it->start);
    auto last = out.begin() + static_cast<std::ptrdiff_t>(it->end);
    first = out.erase(first, last);
    out.insert(first, it->replacement.begin(), it->replacement.end());
  }
  return out;
}

std::string ApplyEdits(std::string_view source, const EditSet& edit_set) {
  const TokenScheme scheme = SchemeFor(edit_set.level);
  return Join(ApplyEdits(Tokenize(source, scheme), edit_set), scheme);
}

void WriteM2Block(std::ostream& out, std::string_view source,
                  const EditSet& edit_set) {
  const TokenScheme scheme = SchemeFor(edit_set.level);
  out << "S " << source << '\n';
  for (const Edit& e : edit_set.edits) {
    out << "A " << e.start << ' ' << e.end << "|||"
        << Join(e.replacement, scheme) << '\n';
  }
  out << '\n';
}

std::vector<M2Block> ReadM2(std::istream& in, Level level) {
  const TokenScheme scheme = SchemeFor(level);
  std::vector<M2Block> blocks;
  std::string line;
  size_t line_no = 0;
  bool open = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      open = false;
      continue;
    }
    if (line.rfind("S ", 0) == 0) {
      blocks.push_back({line.substr(2), EditSet{level, {}}});
      open = true;
    } else if (line.rfind("A ", 0) == 0 && open) {
      const size_t bar = line.find("|||");
      if (bar == std::string::npos) {
        throw DataError("line " + std::to_string(line_no) + ": missing |||");
      }
      Edit e;
      const std::string span = line.substr(2, bar - 2);
      const size_t space = span.find(' ');
      try {
        if (space == std::string::npos) throw std::invalid_argument("span");
        e.start = std::stoul(span.substr(0, space));
        e.end = std::stoul(span.substr(space + 1));
      } catch (const std::logic_error&) {
        throw DataError("line " + std::to_string(line_no) + ": bad span '" +
                        span + "'");
      }
      e.replacement = Tokenize(std::string_view(line).substr(bar + 3), scheme);
      blocks.back().edit_set.edits.push_back(std::move(e));
    } else {
      throw DataError("line " + std::to_string(line_no) +
                      ": expected 'S ' or 'A ' record");
    }
  }
  return blocks;
}

}  // namespace qcascade
