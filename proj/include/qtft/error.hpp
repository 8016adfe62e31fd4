// Copyright 2026 The QTFT Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qtft {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A gate references a qubit outside the register, or control == target.
class InvalidCircuitError : public Error {
  public:
    using Error::Error;
};

/// Angle bindings do not match the circuit's declared slots.
class BindingError : public Error {
  public:
    using Error::Error;
};

/// Operand dimensions do not agree.
class ShapeError : public Error {
  public:
    using Error::Error;
};

/// Malformed or missing input data (CSV, snapshots, reports).
class DataError : public Error {
  public:
    using Error::Error;
};

/// Invalid configuration value.
class ConfigError : public Error {
  public:
    using Error::Error;
};

class TrainingDivergedError : public Error {
  public:
    explicit TrainingDivergedError(std::size_t epoch)
        : Error("training diverged: non-finite loss at epoch " +
                std::to_string(epoch)),
          epoch_(epoch) {}

    [[nodiscard]] std::size_t epoch() const noexcept { return epoch_; }

  private:
    std::size_t epoch_;
};

} // namespace qtft
