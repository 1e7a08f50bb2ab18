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

#ifndef QCASCADE_ERRORS_H_
#define QCASCADE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace qcascade {

// Bad flags, bad config files, missing inputs referenced by a config.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent data (corpus lines, label sets, model files).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A corrector could not produce an answer (remote error, timeout, bad body).
class CorrectorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qcascade

#endif  // QCASCADE_ERRORS_H_
