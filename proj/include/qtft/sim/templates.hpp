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
 * Standard encoding and ansatz circuits.
 *
 * Encodings declare feature slots only; ansätze declare weight slots only.
 * Weight slot order is layer-major: slot = layer * num_qubits + qubit.
 */
#pragma once

#include "qtft/sim/circuit.hpp"

#include <cstddef>

namespace qtft::sim {

/// One rotation per qubit, angle = feature value.
[[nodiscard]] ParameterizedCircuit angle_embedding(std::size_t num_qubits,
                                                   Rotation rotation = Rotation::RX);

/// Second-order Pauli-Z evolution: per repetition H on every qubit,
/// P(2 x_j) on every qubit, then for every pair i < j the block
/// CNOT(i,j) P(2 (pi - x_i)(pi - x_j)) on j, CNOT(i,j).
[[nodiscard]] ParameterizedCircuit zz_feature_map(std::size_t num_qubits,
                                                  std::size_t reps = 1);

/// Per layer: one rotation per qubit, then the CNOT ring
/// (0,1), (1,2), ..., (n-2,n-1), (n-1,0). No ring for one qubit; a
/// two-qubit ring is the pair CNOT(0,1), CNOT(1,0).
[[nodiscard]] ParameterizedCircuit
basic_entangler_layers(std::size_t num_qubits, std::size_t num_layers,
                       Rotation rotation = Rotation::RX);

/// `num_layers` repetitions of (RY layer + CNOT ring) followed by a final RY
/// layer. Requires num_qubits >= 2.
[[nodiscard]] ParameterizedCircuit n_local(std::size_t num_qubits,
                                           std::size_t num_layers);

} // namespace qtft::sim
