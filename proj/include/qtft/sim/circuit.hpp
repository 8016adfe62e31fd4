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
 * Gate lists with feature and weight slots.
 *
 * A ParameterizedCircuit is an immutable, validated gate sequence. Every
 * parametric gate carries an AngleSource describing how its rotation angle
 * is obtained from the bound feature vector x and weight vector w:
 *
 *   Literal        angle = value
 *   Weight         angle = w[slot]
 *   Feature        angle = scale * x[slot]
 *   FeaturePair    angle = scale * (pi - x[slot]) * (pi - x[slot2])
 *
 * The affine and pairwise forms cover angle embedding and the ZZ feature map
 * and have closed-form derivatives, which the parameter-shift code chains
 * through.
 */
#pragma once

#include "qtft/error.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace qtft::sim {

enum class GateKind { H, RX, RY, RZ, PHASE, CNOT, CRZ };

enum class Rotation { RX, RY, RZ };

[[nodiscard]] std::string_view to_string(GateKind kind) noexcept;
[[nodiscard]] std::string_view to_string(Rotation rot) noexcept;
[[nodiscard]] GateKind gate_kind(Rotation rot) noexcept;

[[nodiscard]] constexpr bool is_parametric(GateKind kind) noexcept {
    return kind != GateKind::H && kind != GateKind::CNOT;
}
[[nodiscard]] constexpr bool is_two_qubit(GateKind kind) noexcept {
    return kind == GateKind::CNOT || kind == GateKind::CRZ;
}

struct AngleSource {
    enum class Kind { None, Literal, Weight, Feature, FeaturePair };

    Kind kind = Kind::None;
    double value = 0.0; // literal angle, or scale for feature kinds
    std::size_t slot = 0;
    std::size_t slot2 = 0;

    static AngleSource none() { return {}; }
    static AngleSource literal(double angle) {
        return {Kind::Literal, angle, 0, 0};
    }
    static AngleSource weight(std::size_t slot) {
        return {Kind::Weight, 1.0, slot, 0};
    }
    static AngleSource feature(std::size_t slot, double scale = 1.0) {
        return {Kind::Feature, scale, slot, 0};
    }
    static AngleSource feature_pair(std::size_t i, std::size_t j,
                                    double scale = 2.0) {
        return {Kind::FeaturePair, scale, i, j};
    }

    [[nodiscard]] bool uses_features() const noexcept {
        return kind == Kind::Feature || kind == Kind::FeaturePair;
    }

    friend bool operator==(const AngleSource &, const AngleSource &) = default;
};

/// One gate. For CNOT and CRZ wires = {control, target}; otherwise only
/// wires[0] is meaningful.
struct Gate {
    GateKind kind = GateKind::H;
    std::array<std::size_t, 2> wires{0, 0};
    AngleSource angle;

    [[nodiscard]] std::size_t target() const noexcept {
        return is_two_qubit(kind) ? wires[1] : wires[0];
    }
    [[nodiscard]] std::size_t control() const noexcept { return wires[0]; }

    friend bool operator==(const Gate &, const Gate &) = default;
};

/// Evaluate a gate's angle for the given bindings.
[[nodiscard]] double bind_angle(const AngleSource &src,
                                const Eigen::Ref<const Eigen::VectorXd> &x,
                                const Eigen::Ref<const Eigen::VectorXd> &w);

/// Partial derivative of the bound angle with respect to feature `slot`.
[[nodiscard]] double angle_feature_derivative(
    const AngleSource &src, const Eigen::Ref<const Eigen::VectorXd> &x,
    std::size_t slot);

class ParameterizedCircuit {
  public:
    ParameterizedCircuit() = default;

    /// Validates wires and slot references; throws InvalidCircuitError.
    ParameterizedCircuit(std::size_t num_qubits, std::vector<Gate> ops,
                         std::size_t num_feature_slots,
                         std::size_t num_weight_slots);

    [[nodiscard]] std::size_t num_qubits() const noexcept { return num_qubits_; }
    [[nodiscard]] const std::vector<Gate> &ops() const noexcept { return ops_; }
    [[nodiscard]] std::size_t num_feature_slots() const noexcept {
        return num_feature_slots_;
    }
    [[nodiscard]] std::size_t num_weight_slots() const noexcept {
        return num_weight_slots_;
    }

    /// Throws BindingError unless the vectors match the slot counts.
    void check_bindings(Eigen::Index num_features, Eigen::Index num_weights) const;

    /// Angles of every op, in op order (zero for non-parametric ops).
    [[nodiscard]] Eigen::VectorXd
    bound_angles(const Eigen::Ref<const Eigen::VectorXd> &x,
                 const Eigen::Ref<const Eigen::VectorXd> &w) const;

    friend bool operator==(const ParameterizedCircuit &,
                           const ParameterizedCircuit &) = default;

  private:
    std::size_t num_qubits_ = 1;
    std::vector<Gate> ops_;
    std::size_t num_feature_slots_ = 0;
    std::size_t num_weight_slots_ = 0;
};

/// Sequential composition `second after first` on the same register. Slots of
/// `second` are renumbered after those of `first`.
[[nodiscard]] ParameterizedCircuit compose(const ParameterizedCircuit &first,
                                           const ParameterizedCircuit &second);

/// Mutable helper for assembling a circuit gate by gate.
class CircuitBuilder {
  public:
    explicit CircuitBuilder(std::size_t num_qubits) : num_qubits_(num_qubits) {}

    CircuitBuilder &h(std::size_t q);
    CircuitBuilder &cnot(std::size_t control, std::size_t target);
    CircuitBuilder &rotation(GateKind kind, std::size_t q, AngleSource angle);
    CircuitBuilder &crz(std::size_t control, std::size_t target,
                        AngleSource angle);
    CircuitBuilder &add(Gate gate);

    CircuitBuilder &feature_slots(std::size_t n) {
        num_feature_slots_ = n;
        return *this;
    }
    CircuitBuilder &weight_slots(std::size_t n) {
        num_weight_slots_ = n;
        return *this;
    }

    [[nodiscard]] ParameterizedCircuit build() const;

  private:
    std::size_t num_qubits_;
    std::vector<Gate> ops_;
    std::size_t num_feature_slots_ = 0;
    std::size_t num_weight_slots_ = 0;
};

} // namespace qtft::sim
