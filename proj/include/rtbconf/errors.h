/*
 * Copyright 2026 The rtbconf Authors.
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

#ifndef RTBCONF_ERRORS_H_
#define RTBCONF_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rtbconf {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input does not have the expected columns or structure. `what()` names the
// offending column.
class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& column)
      : Error("schema error: missing column '" + column + "'"),
        column_(column) {}
  const std::string& column() const { return column_; }

 private:
  std::string column_;
};

// Malformed or out-of-range data. `line()` is 1-based (0 when unknown).
class DataError : public Error {
 public:
  DataError(const std::string& message, std::size_t line = 0)
      : Error(line == 0 ? message
                        : "line " + std::to_string(line) + ": " + message),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A caller-supplied argument violates an operation's precondition.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// A synthetic-data or experiment specification is inconsistent.
class SpecificationError : public Error {
 public:
  using Error::Error;
};

}  // namespace rtbconf

#endif  // RTBCONF_ERRORS_H_
