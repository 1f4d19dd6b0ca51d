// Copyright 2026 The motkit Authors
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

#ifndef MOTKIT_ERRORS_H_
#define MOTKIT_ERRORS_H_

#include <stdexcept>
#include <string>

namespace motkit {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: dimension mismatch, bad parameter, invalid marginals.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A numeric operation left its domain (e.g. softmin of -inf values).
class DomainError : public Error {
 public:
  using Error::Error;
};

// An explicit enumeration would exceed the configured brute-force cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

// An oracle answer contradicts its contract.
class OracleViolation : public Error {
 public:
  using Error::Error;
};

// The cost does not expose the oracle an operation needs.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// An iterative method hit its iteration cap.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// A marginal oracle returned zero mass where the target has mass.
class DegenerateSupport : public Error {
 public:
  using Error::Error;
};

// Required accuracy is not representable in double precision.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

// The feasible set of a combinatorial subproblem is empty.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// A junction tree would exceed the configured width cap.
class TreewidthError : public Error {
 public:
  using Error::Error;
};

}  // namespace motkit

#endif  // MOTKIT_ERRORS_H_
