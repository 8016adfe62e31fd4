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
/**
 * @file
 * Central finite-difference check of tape gradients.
 */
#pragma once

#include "qtft/ad/tape.hpp"

#include <functional>
#include <string>

namespace qtft::ad {

struct GradCheckOptions {
    double step = 1e-5;
    double abs_tol = 1e-5;
    double rel_tol = 1e-4;
    /// Added to every parameter entry while the finite-difference side is
    /// evaluated. Nonzero only for fault-injection runs.
    double oracle_offset = 0.0;
};

struct GradCheckResult {
    std::size_t checked = 0;
    std::size_t failures = 0;
    double max_abs_error = 0.0;
    /// |analytic - numeric| / max(|numeric|, 1e-12) at the worst coordinate.
    double max_rel_error = 0.0;
    std::string worst_parameter;
    Eigen::Index worst_index = -1;

    [[nodiscard]] bool passed() const noexcept { return failures == 0; }
};

/// Builds a scalar loss on a fresh tape from the current parameter values.
using LossBuilder = std::function<Var(Tape &)>;

/// Compares backward() gradients of every parameter entry against central
/// differences. A coordinate passes when
/// |analytic - numeric| <= max(abs_tol, rel_tol * |numeric|).
/// Parameter values are restored and grads zeroed on return.
GradCheckResult check_gradients(ParameterStore &params, const LossBuilder &build,
                                const GradCheckOptions &options = {});

} // namespace qtft::ad
