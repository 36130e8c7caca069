/**
 * Copyright 2026 The fedsynth Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FEDSYNTH_ERROR_H_
#define FEDSYNTH_ERROR_H_

#include <stdexcept>
#include <string>

namespace fedsynth {

// Precondition violated by a caller-supplied argument (bad shape, out of
// range parameter, malformed file).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A configuration key failed validation. key() names the offending key so
// the CLI can report it.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string &message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}

  const std::string &key() const { return key_; }

 private:
  std::string key_;
};

// Non-finite values or a degenerate numerical state during a run.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fedsynth

#endif  // FEDSYNTH_ERROR_H_
