// Copyright 2026 The qlstm-forecast Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * Exception hierarchy shared by every module of the library.
 */
#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

namespace qlstm {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Requested register does not fit the simulator limits.
class CapacityError : public Error {
  public:
    using Error::Error;
};

/// Qubit (or other) index outside its valid range.
class IndexError : public Error {
  public:
    using Error::Error;
};

/// Inconsistent dimensions between arguments.
class ShapeError : public Error {
  public:
    using Error::Error;
};

/// Non-finite input or divergent computation.
class NumericError : public Error {
  public:
    using Error::Error;
};

class EmptyInputError : public Error {
  public:
    using Error::Error;
};

class InsufficientDataError : public Error {
  public:
    using Error::Error;
};

/// Backward pass called with caches that do not belong to the parameters.
class StateError : public Error {
  public:
    using Error::Error;
};

/// Malformed input file (CSV).
class FormatError : public Error {
  public:
    using Error::Error;
};

/// Unreadable or version-incompatible model file.
class CompatibilityError : public Error {
  public:
    using Error::Error;
};

/// Bad command-line usage detected after flag parsing.
class UsageError : public Error {
  public:
    using Error::Error;
};

namespace detail {

inline void require_shape(bool ok, const std::string &what) {
    if (!ok) {
        throw ShapeError(what);
    }
}

inline void require_finite(std::span<const double> values,
                           const std::string &what) {
    for (double x : values) {
        if (!std::isfinite(x)) {
            throw NumericError(what + ": non-finite value");
        }
    }
}

} // namespace detail
} // namespace qlstm
