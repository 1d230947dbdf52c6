// Copyright 2026 The Authors.
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

#ifndef ACTIVEDIAG_ERROR_HPP_
#define ACTIVEDIAG_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace activediag {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An identifier or index does not name an element of the model.
class IdentifierError : public Error {
 public:
  using Error::Error;
};

// Input data (model, circuit, fault specification, config) violates an
// invariant. The message names the offending element.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed file contents.
class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// An observation leaves no (state, mode) pair with positive prior. Carries the
// offending action/outcome so callers can reject the step and keep going.
class ContradictionError : public Error {
 public:
  ContradictionError(const std::string& what, std::size_t action,
                     std::size_t outcome)
      : Error(what), action_(action), outcome_(outcome) {}

  std::size_t action() const { return action_; }
  std::size_t outcome() const { return outcome_; }

 private:
  std::size_t action_;
  std::size_t outcome_;
};

// Every action has already been taken.
class ExhaustedError : public Error {
 public:
  using Error::Error;
};

// A search or enumeration would exceed its configured cap.
class SizeError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace activediag

#endif  // ACTIVEDIAG_ERROR_HPP_
