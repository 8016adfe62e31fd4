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
#include "qtft/sim/circuit.hpp"

#include <numbers>

namespace qtft::sim {

std::string_view to_string(GateKind kind) noexcept {
    switch (kind) {
    case GateKind::H:
        return "H";
    case GateKind::RX:
        return "RX";
    case GateKind::RY:
        return "RY";
    case GateKind::RZ:
        return "RZ";
    case GateKind::PHASE:
        return "PHASE";
    case GateKind::CNOT:
        return "CNOT";
    case GateKind::CRZ:
        return "CRZ";
    }
    return "?";
}

std::string_view to_string(Rotation rot) noexcept {
    return to_string(gate_kind(rot));
}

GateKind gate_kind(Rotation rot) noexcept {
    switch (rot) {
    case Rotation::RX:
        return GateKind::RX;
    case Rotation::RY:
        return GateKind::RY;
    case Rotation::RZ:
        return GateKind::RZ;
    }
    return GateKind::RX;
}

double bind_angle(const AngleSource &src,
                  const Eigen::Ref<const Eigen::VectorXd> &x,
                  const Eigen::Ref<const Eigen::VectorXd> &w) {
    using std::numbers::pi;
    const auto i = static_cast<Eigen::Index>(src.slot);
    const auto j = static_cast<Eigen::Index>(src.slot2);
    switch (src.kind) {
    case AngleSource::Kind::None:
        return 0.0;
    case AngleSource::Kind::Literal:
        return src.value;
    case AngleSource::Kind::Weight:
        return w(i);
    case AngleSource::Kind::Feature:
        return src.value * x(i);
    case AngleSource::Kind::FeaturePair:
        return src.value * (pi - x(i)) * (pi - x(j));
    }
    return 0.0;
}

double angle_feature_derivative(const AngleSource &src,
                                const Eigen::Ref<const Eigen::VectorXd> &x,
                                std::size_t slot) {
    using std::numbers::pi;
    switch (src.kind) {
    case AngleSource::Kind::Feature:
        return src.slot == slot ? src.value : 0.0;
    case AngleSource::Kind::FeaturePair: {
        const auto i = static_cast<Eigen::Index>(src.slot);
        const auto j = static_cast<Eigen::Index>(src.slot2);
        double d = 0.0;
        // d/dx_i of s (pi - x_i)(pi - x_j) = -s (pi - x_j)
        if (src.slot == slot) {
            d -= src.value * (pi - x(j));
        }
        if (src.slot2 == slot) {
            d -= src.value * (pi - x(i));
        }
        return d;
    }
    default:
        return 0.0;
    }
}

ParameterizedCircuit::ParameterizedCircuit(std::size_t num_qubits,
                                           std::vector<Gate> ops,
                                           std::size_t num_feature_slots,
                                           std::size_t num_weight_slots)
    : num_qubits_(num_qubits), ops_(std::move(ops)),
      num_feature_slots_(num_feature_slots), num_weight_slots_(num_weight_slots) {
    if (num_qubits_ == 0) {
        throw InvalidCircuitError("circuit needs at least one qubit");
    }
    for (const auto &g : ops_) {
        if (g.wires[0] >= num_qubits_ ||
            (is_two_qubit(g.kind) && g.wires[1] >= num_qubits_)) {
            throw InvalidCircuitError(std::string(to_string(g.kind)) +
                                      " wire out of range");
        }
        if (is_two_qubit(g.kind) && g.wires[0] == g.wires[1]) {
            throw InvalidCircuitError(std::string(to_string(g.kind)) +
                                      ": control equals target");
        }
        const bool has_angle = g.angle.kind != AngleSource::Kind::None;
        if (is_parametric(g.kind) != has_angle) {
            throw InvalidCircuitError(std::string(to_string(g.kind)) +
                                      (has_angle ? " takes no angle"
                                                 : " needs exactly one angle source"));
        }
        switch (g.angle.kind) {
        case AngleSource::Kind::Weight:
            if (g.angle.slot >= num_weight_slots_) {
                throw InvalidCircuitError("weight slot out of range");
            }
            break;
        case AngleSource::Kind::FeaturePair:
            if (g.angle.slot2 >= num_feature_slots_) {
                throw InvalidCircuitError("feature slot out of range");
            }
            [[fallthrough]];
        case AngleSource::Kind::Feature:
            if (g.angle.slot >= num_feature_slots_) {
                throw InvalidCircuitError("feature slot out of range");
            }
            break;
        default:
            break;
        }
    }
}

void ParameterizedCircuit::check_bindings(Eigen::Index num_features,
                                          Eigen::Index num_weights) const {
    if (static_cast<std::size_t>(num_features) != num_feature_slots_) {
        throw BindingError("expected " + std::to_string(num_feature_slots_) +
                           " features, got " + std::to_string(num_features));
    }
    if (static_cast<std::size_t>(num_weights) != num_weight_slots_) {
        throw BindingError("expected " + std::to_string(num_weight_slots_) +
                           " weights, got " + std::to_string(num_weights));
    }
}

Eigen::VectorXd
ParameterizedCircuit::bound_angles(const Eigen::Ref<const Eigen::VectorXd> &x,
                                   const Eigen::Ref<const Eigen::VectorXd> &w) const {
    Eigen::VectorXd angles(static_cast<Eigen::Index>(ops_.size()));
    for (std::size_t k = 0; k < ops_.size(); ++k) {
        angles(static_cast<Eigen::Index>(k)) = bind_angle(ops_[k].angle, x, w);
    }
    return angles;
}

ParameterizedCircuit compose(const ParameterizedCircuit &first,
                             const ParameterizedCircuit &second) {
    if (first.num_qubits() != second.num_qubits()) {
        throw InvalidCircuitError("cannot compose circuits of different width");
    }
    std::vector<Gate> ops = first.ops();
    ops.reserve(ops.size() + second.ops().size());
    for (Gate g : second.ops()) {
        switch (g.angle.kind) {
        case AngleSource::Kind::Weight:
            g.angle.slot += first.num_weight_slots();
            break;
        case AngleSource::Kind::FeaturePair:
            g.angle.slot2 += first.num_feature_slots();
            [[fallthrough]];
        case AngleSource::Kind::Feature:
            g.angle.slot += first.num_feature_slots();
            break;
        default:
            break;
        }
        ops.push_back(g);
    }
    return {first.num_qubits(), std::move(ops),
            first.num_feature_slots() + second.num_feature_slots(),
            first.num_weight_slots() + second.num_weight_slots()};
}

CircuitBuilder &CircuitBuilder::h(std::size_t q) {
    return add({GateKind::H, {q, q}, AngleSource::none()});
}

CircuitBuilder &CircuitBuilder::cnot(std::size_t control, std::size_t target) {
    return add({GateKind::CNOT, {control, target}, AngleSource::none()});
}

CircuitBuilder &CircuitBuilder::rotation(GateKind kind, std::size_t q,
                                         AngleSource angle) {
    return add({kind, {q, q}, angle});
}

CircuitBuilder &CircuitBuilder::crz(std::size_t control, std::size_t target,
                                    AngleSource angle) {
    return add({GateKind::CRZ, {control, target}, angle});
}

CircuitBuilder &CircuitBuilder::add(Gate gate) {
    ops_.push_back(gate);
    return *this;
}

ParameterizedCircuit CircuitBuilder::build() const {
    return {num_qubits_, ops_, num_feature_slots_, num_weight_slots_};
}

} // namespace qtft::sim
