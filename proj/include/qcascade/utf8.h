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

#ifndef QCASCADE_UTF8_H_
#define QCASCADE_UTF8_H_

#include <string>
#include <string_view>
#include <vector>

namespace qcascade::utf8 {

// Splits UTF-8 text into one string per codepoint. Invalid bytes are kept
// as single-byte units so that concatenating the result always gives back
// the input.
std::vector<std::string> Codepoints(std::string_view text);

// Number of codepoints, using the same rule as Codepoints().
size_t Length(std::string_view text);

// Trims ASCII whitespace on both ends.
std::string_view Trim(std::string_view text);

// True when `unit` holds exactly one codepoint.
bool IsSingleCodepoint(std::string_view unit);

}  // namespace qcascade::utf8

#endif  // QCASCADE_UTF8_H_
