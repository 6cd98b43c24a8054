/*
 * Copyright 2026 The qclone Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace qclone {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Matrix shape does not fit the operation (non-square, mismatched modes).
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Input exceeds a hard size guard.
class SizeError : public Error {
 public:
  using Error::Error;
};

// Photon numbers of input and output configurations differ.
class ConservationError : public Error {
 public:
  using Error::Error;
};

// A documented precondition was violated by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Zero probability of the post-selected coincidence event.
class DegeneratePostSelectionError : public Error {
 public:
  using Error::Error;
};

// Fidelity estimate requested from zero recorded coincidences.
class EmptySampleError : public Error {
 public:
  using Error::Error;
};

// Objective function produced a non-finite value.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

// Malformed configuration or data file. Carries the offending line when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0) : ParseError(what, line, {}) {}

  // `source` (usually a file path) is prepended to the message.
  ParseError(const std::string& what, int line, const std::string& source)
      : Error(format(what, line, source)), line_(line), detail_(what) {}

  int line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  static std::string format(const std::string& what, int line, const std::string& source) {
    std::string s = source.empty() ? "" : source + ": ";
    if (line > 0) s += "line " + std::to_string(line) + ": ";
    return s + what;
  }

  int line_;
  std::string detail_;
};

}  // namespace qclone
