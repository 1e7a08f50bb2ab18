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

#include "qcascade/utf8.h"

namespace qcascade::utf8 {
namespace {

// Byte length of the sequence starting at `lead`, or 1 when the sequence
// is not well formed.
size_t SequenceLength(std::string_view text, size_t pos) {
  const auto lead = static_cast<unsigned char>(text[pos]);
  size_t len = 1;
  if (lead >= 0xF0 && lead <= 0xF4) {
    len = 4;
  } else if (lead >= 0xE0) {
    len = 3;
  } else if (lead >= 0xC2 && lead <= 0xDF) {
    len = 2;
  }
  if (len == 1 || pos + len > text.size()) return 1;
  for (size_t k = 1; k < len; ++k) {
    const auto cont = static_cast<unsigned char>(text[pos + k]);
    if ((cont & 0xC0) != 0x80) return 1;
  }
  return len;
}

}  // namespace

std::vector<std::string> Codepoints(std::string_view text) {
  std::vector<std::string> units;
  units.reserve(text.size());
  for (size_t pos = 0; pos < text.size();) {
    const size_t len = SequenceLength(text, pos);
    units.emplace_back(text.substr(pos, len));
    pos += len;
  }
  return units;
}

size_t Length(std::string_view text) {
  size_t count = 0;
  for (size_t pos = 0; pos < text.size(); ++count) {
    pos += SequenceLength(text, pos);
  }
  return count;
}

std::string_view Trim(std::string_view text) {
  constexpr std::string_view kSpace = " \t\r\n\f\v";
  const size_t first = text.find_first_not_of(kSpace);
  if (first == std::string_view::npos) return {};
  const size_t last = text.find_last_not_of(kSpace);
  return text.substr(first, last - first + 1);
}

bool IsSingleCodepoint(std::string_view unit) {
  return !unit.empty() && SequenceLength(unit, 0) == unit.size();
}

}  // namespace qcascade::utf8
