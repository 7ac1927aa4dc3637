// Copyright 2026 The sparsify Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace sparsify {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Instance or solution violates a structural invariant.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Every candidate item has zero weight; the caller must supply fallback weights.
class AllZeroWeights : public Error {
 public:
  AllZeroWeights() : Error("all item weights are zero") {}
};

// Some arrival sends more than unit weight; an upstream sparsifier is broken.
class ArrivalOverflow : public Error {
 public:
  using Error::Error;
};

// A demand type with zero probability was passed to the LP solver.
class DegenerateType : public Error {
 public:
  using Error::Error;
};

class BadSize : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class EmptyWindow : public Error {
 public:
  using Error::Error;
};

class UnknownStrategy : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace sparsify
