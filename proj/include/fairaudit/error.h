/*
 * Copyright 2026 The fairaudit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FAIRAUDIT_ERROR_H_
#define FAIRAUDIT_ERROR_H_

#include <stdexcept>
#include <string>

namespace fairaudit {

// Broad failure categories. The CLI maps the first group (schema, parse,
// domain, argument) to exit code 2 and everything else to exit code 1.
enum class ErrorKind {
  kSchema,
  kParse,
  kDomain,
  kArgument,
  kStratification,
  kNeighbor,
  kDegenerate,
  kUndefinedMetric,
  kDivergence,
  kBound,
  kIo,
};

const char* ErrorKindName(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

  // True for errors caused by bad user input rather than internal failures.
  bool is_input_error() const {
    return kind_ == ErrorKind::kSchema || kind_ == ErrorKind::kParse ||
           kind_ == ErrorKind::kDomain || kind_ == ErrorKind::kArgument;
  }

 private:
  ErrorKind kind_;
};

}  // namespace fairaudit

#endif  // FAIRAUDIT_ERROR_H_
