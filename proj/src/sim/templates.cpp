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
#include "qtft/sim/templates.hpp"

namespace qtft::sim {

namespace {

void cnot_ring(CircuitBuilder &b, std::size_t n) {
    if (n < 2) {
        return;
    }
    for (std::size_t q = 0; q + 1 < n; ++q) {
        b.cnot(q, q + 1);
    }
    b.cnot(n - 1, 0);
}

void rotation_layer(CircuitBuilder &b, GateKind kind, std::size_t n,
                    std::size_t first_slot) {
    for (std::size_t q = 0; q < n; ++q) {
        b.rotation(kind, q, AngleSource::weight(first_slot + q));
    }
}

} // namespace

ParameterizedCircuit angle_embedding(std::size_t num_qubits, Rotation rotation) {
    CircuitBuilder b(num_qubits);
    for (std::size_t q = 0; q < num_qubits; ++q) {
        b.rotation(gate_kind(rotation), q, AngleSource::feature(q));
    }
    return b.feature_slots(num_qubits).build();
}

ParameterizedCircuit zz_feature_map(std::size_t num_qubits, std::size_t reps) {
    CircuitBuilder b(num_qubits);
    for (std::size_t r = 0; r < reps; ++r) {
        for (std::size_t q = 0; q < num_qubits; ++q) {
            b.h(q);
        }
        for (std::size_t q = 0; q < num_qubits; ++q) {
            b.rotation(GateKind::PHASE, q, AngleSource::feature(q, 2.0));
        }
        for (std::size_t i = 0; i < num_qubits; ++i) {
            for (std::size_t j = i + 1; j < num_qubits; ++j) {
                b.cnot(i, j);
                b.rotation(GateKind::PHASE, j, AngleSource::feature_pair(i, j));
                b.cnot(i, j);
            }
        }
    }
    return b.feature_slots(num_qubits).build();
}

ParameterizedCircuit basic_entangler_layers(std::size_t num_qubits,
                                            std::size_t num_layers,
                                            Rotation rotation) {
    CircuitBuilder b(num_qubits);
    for (std::size_t l = 0; l < num_layers; ++l) {
        rotation_layer(b, gate_kind(rotation), num_qubits, l * num_qubits);
        cnot_ring(b, num_qubits);
    }
    return b.weight_slots(num_layers * num_qubits).build();
}

ParameterizedCircuit n_local(std::size_t num_qubits, std::size_t num_layers) {
    if (num_qubits < 2) {
        throw InvalidCircuitError("n_local needs at least two qubits");
    }
    CircuitBuilder b(num_qubits);
    for (std::size_t l = 0; l < num_layers; ++l) {
        rotation_layer(b, GateKind::RY, num_qubits, l * num_qubits);
        cnot_ring(b, num_qubits);
    }
    rotation_layer(b, GateKind::RY, num_qubits, num_layers * num_qubits);
    return b.weight_slots((num_layers + 1) * num_qubits).build();
}

} // namespace qtft::sim
