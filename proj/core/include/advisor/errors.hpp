// Copyright 2026 The Advisor Authors
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

#ifndef ADVISOR_ERRORS_HPP_
#define ADVISOR_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace advisor {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyTokenError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class DuplicateUserError : public Error {
 public:
  using Error::Error;
};

class DuplicateDishError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class SchemaVersionMismatchError : public Error {
 public:
  SchemaVersionMismatchError(int found, int expected)
      : Error("unsupported schema_version " + std::to_string(found) +
              " (expected " + std::to_string(expected) + ")"),
        found_(found) {}
  int found() const { return found_; }

 private:
  int found_;
};

// Malformed snapshot or ingestion record. `record` is the zero-based record
// index (or the 1-based line for line-oriented input), `field` the offending
// field path.
class ParseError : public Error {
 public:
  ParseError(std::string message, std::size_t record, std::string field)
      : Error(std::move(message)), record_(record), field_(std::move(field)) {}
  std::size_t record() const { return record_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t record_;
  std::string field_;
};

class UnsupportedIntentError : public Error {
 public:
  using Error::Error;
};

class BackendUnavailableError : public Error {
 public:
  using Error::Error;
};

class ReplanCapExceededError : public Error {
 public:
  using Error::Error;
};

class TooLargeError : public Error {
 public:
  using Error::Error;
};

class EmptyReportError : public Error {
 public:
  using Error::Error;
};

class InternalError : public Error {
 public:
  using Error::Error;
};

class SessionClosedError : public Error {
 public:
  using Error::Error;
};

class TurnInFlightError : public Error {
 public:
  using Error::Error;
};

class InvalidConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace advisor

#endif  // ADVISOR_ERRORS_HPP_
