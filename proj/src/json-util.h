// src/json-util.h
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

#ifndef TRANSDUCE_SRC_JSON_UTIL_H_
#define TRANSDUCE_SRC_JSON_UTIL_H_

#include <string>
#include <vector>

#include "Eigen/Core"
#include "nlohmann/json.hpp"

namespace transduce {

// Rows of `m` as a JSON array of arrays.
nlohmann::json MatrixRowsToJson(const Eigen::MatrixXd &m);

// Inverse of MatrixRowsToJson. `cols` is required when the array is empty;
// pass -1 to infer it from the first row. Throws IoError on ragged rows.
Eigen::MatrixXd MatrixRowsFromJson(const nlohmann::json &j, int64_t cols);

std::string ReadFile(const std::string &path);
void WriteFile(const std::string &path, const std::string &contents);

// Splits on '\n'; a trailing empty line is dropped.
std::vector<std::string> SplitLines(const std::string &text);

}  // namespace transduce

#endif  // TRANSDUCE_SRC_JSON_UTIL_H_
