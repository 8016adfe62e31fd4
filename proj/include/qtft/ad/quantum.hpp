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
 * Circuit expectations as differentiable tape nodes.
 *
 * Gradients come from shift rules applied to each gate occurrence: for
 * RX/RY/RZ/PHASE
 *
 *     d<Z>/dangle = ( <Z>(angle + pi/2) - <Z>(angle - pi/2) ) / 2
 *
 * and for CRZ the four-term rule with shifts pi/2 and 3pi/2. A slot that
 * feeds several gates gets the sum over its occurrences, each weighted by the
 * derivative of that gate's angle map.
 */
#pragma once

#include "qtft/ad/tape.hpp"
#include "qtft/sim/circuit.hpp"

#include <Eigen/Dense>

#include <cstddef>

namespace qtft::ad {

enum class SlotKind { Feature, Weight };

struct SlotRef {
    SlotKind kind = SlotKind::Weight;
    std::size_t index = 0;
};

/// d<Z_q>/d(slot) for every qubit q.
struct CircuitJacobian {
    Eigen::MatrixXd features; // num_qubits x num_feature_slots
    Eigen::MatrixXd weights;  // num_qubits x num_weight_slots
};

/// Per-qubit derivative of <Z> with respect to the angle of op `op_index`,
/// with every other angle held at `angles`.
[[nodiscard]] Eigen::VectorXd
shift_gradient(const sim::ParameterizedCircuit &circuit,
               const Eigen::VectorXd &angles, std::size_t op_index);

[[nodiscard]] double param_shift_partial(const sim::ParameterizedCircuit &circuit,
                                         const Eigen::VectorXd &features,
                                         const Eigen::VectorXd &weights,
                                         std::size_t out_qubit, SlotRef slot);

[[nodiscard]] CircuitJacobian
param_shift_jacobian(const sim::ParameterizedCircuit &circuit,
                     const Eigen::VectorXd &features,
                     const Eigen::VectorXd &weights, bool want_features = true,
                     bool want_weights = true);

/// Per-qubit <Z> of the circuit bound to (features, weights), as a column
/// vector node. Both inputs must be column vectors matching the slot counts.
[[nodiscard]] Var expval_z(const sim::ParameterizedCircuit &circuit,
                           const Var &features, const Var &weights);

} // namespace qtft::ad
