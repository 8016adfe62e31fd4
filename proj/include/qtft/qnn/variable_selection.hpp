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

#include "qtft/nn/variable_selection.hpp"
#include "qtft/qnn/blocks.hpp"

namespace qtft::qnn {

using QgrnSelectionParams = nn::VariableSelectionParams<QgrnParams>;

/// Variable selection with every GRN replaced by a QGRN. The weight QGRN runs
/// at width m on the dense-flattened embeddings.
[[nodiscard]] inline nn::Selection q_variable_selection(Tape &tape,
                                                        std::span<const Var> embeddings,
                                                        const std::optional<Var> &context,
                                                        const QgrnSelectionParams &p) {
    return nn::select_variables(tape, embeddings, context, p,
                                [](Tape &t, const QgrnParams &g, const Var &a,
                                   const std::optional<Var> &c) { return qgrn(t, a, c, g); });
}

[[nodiscard]] inline nn::StaticContexts
q_static_covariate_encoder(Tape &tape, const Var &xi, const std::array<QgrnParams, 4> &encoders) {
    return nn::encode_static(tape, xi, encoders,
                             [](Tape &t, const QgrnParams &g, const Var &a,
                                const std::optional<Var> &c) { return qgrn(t, a, c, g); });
}

} // namespace qtft::qnn
