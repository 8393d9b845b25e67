// include/transduce/errors.h
//
// Copyright (c)  2026  The Transduce Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TRANSDUCE_ERRORS_H_
#define TRANSDUCE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace transduce {

// Bad configuration values or inconsistent shapes supplied by the caller.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string &what) : std::invalid_argument(what) {}
};

// File could not be opened, read, written, or parsed.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string &what) : std::runtime_error(what) {}
};

// Training produced a non-finite loss.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(const std::string &what)
      : std::runtime_error(what) {}
};

}  // namespace transduce

#endif  // TRANSDUCE_ERRORS_H_
