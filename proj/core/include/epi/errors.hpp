// Licensed under the Apache License, Version 2.0 (the "License"); you
// may not use this file except in compliance with the License.  You
// may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied.  See the License for the specific language governing
// permissions and limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace epi {

/// Base class of every exception thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A required file is missing or cannot be read/written.
class IoError : public Error {
public:
    using Error::Error;
};

/// A file exists but its content does not match the documented schema.
/// Carries the 1-based line number when one is known (0 otherwise).
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what, int line = 0)
        : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what), line_(line)
    {
    }

    [[nodiscard]] auto line() const -> int { return line_; }

private:
    int line_ = 0;
};

/// A precondition on arguments was violated (empty input, shape
/// mismatch, out-of-range probability, degenerate evaluation set, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A numerical quantity that must be finite was not.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Training encountered a non-finite loss and was aborted.
class DivergedLoss : public NumericError {
public:
    using NumericError::NumericError;
};

} // namespace epi
