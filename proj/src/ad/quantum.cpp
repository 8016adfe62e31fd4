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
#include "qtft/ad/quantum.hpp"

#include "qtft/error.hpp"
#include "qtft/sim/state_vector.hpp"

#include <cmath>
#include <numbers>

namespace qtft::ad {

namespace {

using sim::AngleSource;
using sim::GateKind;

Eigen::VectorXd expectations(const sim::ParameterizedCircuit &circuit,
                             const Eigen::VectorXd &angles) {
    return sim::measure_all_z(sim::run_with_angles<double>(circuit, angles));
}

Eigen::VectorXd shifted_difference(const sim::ParameterizedCircuit &circuit,
                                   Eigen::VectorXd &angles, Eigen::Index k,
                                   double shift) {
    const double base = angles(k);
    angles(k) = base + shift;
    Eigen::VectorXd plus = expectations(circuit, angles);
    angles(k) = base - shift;
    plus -= expectations(circuit, angles);
    angles(k) = base;
    return plus;
}

bool depends_on(const AngleSource &src, SlotRef slot) {
    switch (src.kind) {
    case AngleSource::Kind::Weight:
        return slot.kind == SlotKind::Weight && src.slot == slot.index;
    case AngleSource::Kind::Feature:
        return slot.kind == SlotKind::Feature && src.slot == slot.index;
    case AngleSource::Kind::FeaturePair:
        return slot.kind == SlotKind::Feature &&
               (src.slot == slot.index || src.slot2 == slot.index);
    default:
        return false;
    }
}

} // namespace

Eigen::VectorXd shift_gradient(const sim::ParameterizedCircuit &circuit,
                               const Eigen::VectorXd &angles,
                               std::size_t op_index) {
    using std::numbers::pi;
    const auto &gate = circuit.ops().at(op_index);
    const auto k = static_cast<Eigen::Index>(op_index);
    Eigen::VectorXd work = angles;
    switch (gate.kind) {
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
    case GateKind::PHASE:
        return 0.5 * shifted_difference(circuit, work, k, pi / 2);
    case GateKind::CRZ: {
        const double root2 = std::numbers::sqrt2;
        const double c1 = (root2 + 1.0) / (4.0 * root2);
        const double c2 = (root2 - 1.0) / (4.0 * root2);
        return c1 * shifted_difference(circuit, work, k, pi / 2) -
               c2 * shifted_difference(circuit, work, k, 3 * pi / 2);
    }
    default:
        return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(circuit.num_qubits()));
    }
}

double param_shift_partial(const sim::ParameterizedCircuit &circuit,
                           const Eigen::VectorXd &features,
                           const Eigen::VectorXd &weights, std::size_t out_qubit,
                           SlotRef slot) {
    circuit.check_bindings(features.size(), weights.size());
    if (out_qubit >= circuit.num_qubits()) {
        throw InvalidCircuitError("measured qubit out of range");
    }
    const Eigen::VectorXd angles = circuit.bound_angles(features, weights);
    const auto q = static_cast<Eigen::Index>(out_qubit);
    double total = 0.0;
    const auto &ops = circuit.ops();
    for (std::size_t k = 0; k < ops.size(); ++k) {
        if (!depends_on(ops[k].angle, slot)) {
            continue;
        }
        const double chain =
            slot.kind == SlotKind::Weight
                ? 1.0
                : sim::angle_feature_derivative(ops[k].angle, features, slot.index);
        total += chain * shift_gradient(circuit, angles, k)(q);
    }
    return total;
}

CircuitJacobian param_shift_jacobian(const sim::ParameterizedCircuit &circuit,
                                     const Eigen::VectorXd &features,
                                     const Eigen::VectorXd &weights,
                                     bool want_features, bool want_weights) {
    circuit.check_bindings(features.size(), weights.size());
    const auto n = static_cast<Eigen::Index>(circuit.num_qubits());
    CircuitJacobian jac{
        Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(circuit.num_feature_slots())),
        Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(circuit.num_weight_slots()))};
    const Eigen::VectorXd angles = circuit.bound_angles(features, weights);
    const auto &ops = circuit.ops();
    for (std::size_t k = 0; k < ops.size(); ++k) {
        const auto &src = ops[k].angle;
        const bool is_weight = src.kind == AngleSource::Kind::Weight;
        if ((is_weight && !want_weights) || (src.uses_features() && !want_features) ||
            (!is_weight && !src.uses_features())) {
            continue;
        }
        const Eigen::VectorXd g = shift_gradient(circuit, angles, k);
        if (is_weight) {
            jac.weights.col(static_cast<Eigen::Index>(src.slot)) += g;
            continue;
        }
        jac.features.col(static_cast<Eigen::Index>(src.slot)) +=
            sim::angle_feature_derivative(src, features, src.slot) * g;
        if (src.kind == AngleSource::Kind::FeaturePair && src.slot2 != src.slot) {
            jac.features.col(static_cast<Eigen::Index>(src.slot2)) +=
                sim::angle_feature_derivative(src, features, src.slot2) * g;
        }
    }
    return jac;
}

Var expval_z(const sim::ParameterizedCircuit &circuit, const Var &features,
             const Var &weights) {
    if (features.cols() != 1 || weights.cols() != 1) {
        throw ShapeError("circuit bindings must be column vectors");
    }
    circuit.check_bindings(features.rows(), weights.rows());
    const Eigen::VectorXd x = features.value().col(0);
    const Eigen::VectorXd w = weights.value().col(0);
    Eigen::MatrixXd value = sim::measure_all_z(sim::run_circuit(circuit, x, w));
    return features.tape()->record(
        std::move(value), {features, weights},
        [circuit, features, weights, x, w](Tape &t, const Eigen::MatrixXd &g) {
            const bool fx = features.requires_grad();
            const bool fw = weights.requires_grad();
            const auto jac = param_shift_jacobian(circuit, x, w, fx, fw);
            if (fx) {
                t.accumulate(features, jac.features.transpose() * g);
            }
            if (fw) {
                t.accumulate(weights, jac.weights.transpose() * g);
            }
        });
}

} // namespace qtft::ad
