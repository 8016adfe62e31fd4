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
 * Finite-difference checks over every learnable block and the full models.
 */
#pragma once

#include "qtft/ad/gradcheck.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qtft::diagnostics {

struct BlockCheck {
    std::string block;
    ad::GradCheckResult result;
    double seconds = 0.0;
};

struct SuiteOptions {
    std::uint64_t seed = 7;
    ad::GradCheckOptions check;
    bool include_models = true;
};

/// Blocks, in order: glu, grn, variable_selection, static_encoder, lstm,
/// multi_head_attention, vqc, qglu, qgrn, q_variable_selection,
/// q_attention, qlstm, then tft, qtft and qtft-qlstm end to end on the
/// pinball loss (d_model = 2, two past and two future steps).
[[nodiscard]] std::vector<BlockCheck> run_gradient_suite(const SuiteOptions &options = {});

/// End-to-end check of one model kind ("tft", "qtft", "qtft-qlstm").
[[nodiscard]] BlockCheck check_model(const std::string &kind, const SuiteOptions &options = {});

} // namespace qtft::diagnostics
