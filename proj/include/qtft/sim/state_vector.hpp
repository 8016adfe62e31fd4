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
 * Dense statevector and gate kernels.
 *
 * Qubit 0 is the most significant bit of the basis index, so for n qubits
 * qubit q owns bit (n - 1 - q).
 */
#pragma once

#include "qtft/sim/circuit.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>

namespace qtft::sim {

template <typename Real> class StateVector {
  public:
    using Complex = std::complex<Real>;
    using Amplitudes = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

    /// |0...0> on `num_qubits` qubits.
    explicit StateVector(std::size_t num_qubits)
        : num_qubits_(num_qubits),
          amplitudes_(Amplitudes::Zero(Eigen::Index{1} << num_qubits)) {
        if (num_qubits == 0) {
            throw InvalidCircuitError("state vector needs at least one qubit");
        }
        amplitudes_(0) = Complex{1};
    }

    /// Wraps explicit amplitudes; the length must be a power of two.
    explicit StateVector(Amplitudes amplitudes)
        : amplitudes_(std::move(amplitudes)) {
        const auto len = static_cast<std::size_t>(amplitudes_.size());
        if (len < 2 || (len & (len - 1)) != 0) {
            throw InvalidCircuitError("amplitude count must be 2^n with n >= 1");
        }
        while ((std::size_t{1} << num_qubits_) < len) {
            ++num_qubits_;
        }
    }

    [[nodiscard]] std::size_t num_qubits() const noexcept { return num_qubits_; }
    [[nodiscard]] Eigen::Index dim() const noexcept { return amplitudes_.size(); }
    [[nodiscard]] const Amplitudes &amplitudes() const noexcept {
        return amplitudes_;
    }
    [[nodiscard]] Amplitudes &amplitudes() noexcept { return amplitudes_; }
    [[nodiscard]] Complex operator()(Eigen::Index i) const { return amplitudes_(i); }

    [[nodiscard]] Real norm_squared() const { return amplitudes_.squaredNorm(); }

    [[nodiscard]] std::size_t bit_of(std::size_t qubit) const noexcept {
        return num_qubits_ - 1 - qubit;
    }

  private:
    std::size_t num_qubits_ = 0;
    Amplitudes amplitudes_;
};

namespace detail {

template <typename Real>
void apply_single(StateVector<Real> &state, std::size_t qubit,
                  const Eigen::Matrix<std::complex<Real>, 2, 2> &m) {
    auto &amp = state.amplitudes();
    const Eigen::Index stride = Eigen::Index{1} << state.bit_of(qubit);
    const Eigen::Index dim = state.dim();
    for (Eigen::Index base = 0; base < dim; base += 2 * stride) {
        for (Eigen::Index i = base; i < base + stride; ++i) {
            const auto a0 = amp(i);
            const auto a1 = amp(i + stride);
            amp(i) = m(0, 0) * a0 + m(0, 1) * a1;
            amp(i + stride) = m(1, 0) * a0 + m(1, 1) * a1;
        }
    }
}

template <typename Real>
void apply_diagonal(StateVector<Real> &state, std::size_t qubit,
                    std::complex<Real> d0, std::complex<Real> d1,
                    std::optional<std::size_t> control = std::nullopt) {
    auto &amp = state.amplitudes();
    const Eigen::Index tmask = Eigen::Index{1} << state.bit_of(qubit);
    const Eigen::Index cmask =
        control ? (Eigen::Index{1} << state.bit_of(*control)) : 0;
    for (Eigen::Index i = 0; i < state.dim(); ++i) {
        if ((i & cmask) != cmask) {
            continue;
        }
        amp(i) *= (i & tmask) ? d1 : d0;
    }
}

template <typename Real>
void apply_cnot(StateVector<Real> &state, std::size_t control,
                std::size_t target) {
    auto &amp = state.amplitudes();
    const Eigen::Index tmask = Eigen::Index{1} << state.bit_of(target);
    const Eigen::Index cmask = Eigen::Index{1} << state.bit_of(control);
    for (Eigen::Index i = 0; i < state.dim(); ++i) {
        if ((i & cmask) && !(i & tmask)) {
            std::swap(amp(i), amp(i | tmask));
        }
    }
}

} // namespace detail

/// 2x2 matrix of a single-qubit gate; RX/RY/RZ are exp(-i angle P / 2).
template <typename Real>
[[nodiscard]] Eigen::Matrix<std::complex<Real>, 2, 2>
single_qubit_matrix(GateKind kind, Real angle) {
    using C = std::complex<Real>;
    const Real c = std::cos(angle / 2);
    const Real s = std::sin(angle / 2);
    Eigen::Matrix<C, 2, 2> m;
    switch (kind) {
    case GateKind::H: {
        const Real r = Real{1} / std::sqrt(Real{2});
        m << C{r}, C{r}, C{r}, C{-r};
        break;
    }
    case GateKind::RX:
        m << C{c}, C{0, -s}, C{0, -s}, C{c};
        break;
    case GateKind::RY:
        m << C{c}, C{-s}, C{s}, C{c};
        break;
    case GateKind::RZ:
        m << C{c, -s}, C{0}, C{0}, C{c, s};
        break;
    case GateKind::PHASE:
        m << C{1}, C{0}, C{0}, std::polar(Real{1}, angle);
        break;
    default:
        throw InvalidCircuitError("not a single-qubit gate: " +
                                  std::string(to_string(kind)));
    }
    return m;
}

/// Applies `gate` in place. `angle` must be present iff the gate is parametric.
template <typename Real>
void apply_gate_inplace(StateVector<Real> &state, const Gate &gate,
                        std::optional<Real> angle) {
    const std::size_t n = state.num_qubits();
    if (gate.wires[0] >= n || (is_two_qubit(gate.kind) && gate.wires[1] >= n)) {
        throw InvalidCircuitError("gate wire out of range for " +
                                  std::to_string(n) + "-qubit state");
    }
    if (is_two_qubit(gate.kind) && gate.wires[0] == gate.wires[1]) {
        throw InvalidCircuitError("control equals target");
    }
    if (is_parametric(gate.kind) != angle.has_value()) {
        throw BindingError(std::string(to_string(gate.kind)) +
                           (angle ? " takes no angle" : " requires an angle"));
    }
    using C = std::complex<Real>;
    switch (gate.kind) {
    case GateKind::CNOT:
        detail::apply_cnot(state, gate.wires[0], gate.wires[1]);
        break;
    case GateKind::CRZ:
        detail::apply_diagonal(state, gate.wires[1],
                               std::polar(Real{1}, -*angle / 2),
                               std::polar(Real{1}, *angle / 2), gate.wires[0]);
        break;
    case GateKind::RZ:
        detail::apply_diagonal(state, gate.wires[0],
                               std::polar(Real{1}, -*angle / 2),
                               std::polar(Real{1}, *angle / 2));
        break;
    case GateKind::PHASE:
        detail::apply_diagonal(state, gate.wires[0], C{1},
                               std::polar(Real{1}, *angle));
        break;
    default:
        detail::apply_single(state, gate.wires[0],
                             single_qubit_matrix<Real>(gate.kind,
                                                       angle.value_or(Real{0})));
    }
}

template <typename Real>
[[nodiscard]] StateVector<Real> apply_gate(StateVector<Real> state,
                                           const Gate &gate,
                                           std::optional<Real> angle = {}) {
    apply_gate_inplace(state, gate, angle);
    return state;
}

/// Runs the circuit on |0...0> with the per-op angles already resolved.
template <typename Real = double>
[[nodiscard]] StateVector<Real>
run_with_angles(const ParameterizedCircuit &circuit,
                const Eigen::Ref<const Eigen::VectorXd> &angles) {
    StateVector<Real> state(circuit.num_qubits());
    const auto &ops = circuit.ops();
    for (std::size_t k = 0; k < ops.size(); ++k) {
        std::optional<Real> angle;
        if (is_parametric(ops[k].kind)) {
            angle = static_cast<Real>(angles(static_cast<Eigen::Index>(k)));
        }
        apply_gate_inplace(state, ops[k], angle);
    }
    return state;
}

/// V(w) U(x) |0...0>.
template <typename Real = double>
[[nodiscard]] StateVector<Real>
run_circuit(const ParameterizedCircuit &circuit,
            const Eigen::Ref<const Eigen::VectorXd> &features,
            const Eigen::Ref<const Eigen::VectorXd> &weights) {
    circuit.check_bindings(features.size(), weights.size());
    return run_with_angles<Real>(circuit, circuit.bound_angles(features, weights));
}

// Measurement

template <typename Real>
[[nodiscard]] Real pauli_z_expectation(const StateVector<Real> &state,
                                       std::size_t qubit) {
    if (qubit >= state.num_qubits()) {
        throw InvalidCircuitError("measured qubit " + std::to_string(qubit) +
                                  " out of range");
    }
    const Eigen::Index mask = Eigen::Index{1} << state.bit_of(qubit);
    Real acc{0};
    for (Eigen::Index i = 0; i < state.dim(); ++i) {
        const Real p = std::norm(state(i));
        acc += (i & mask) ? -p : p;
    }
    return acc;
}

/// <Z_q> for every qubit, qubit 0 first.
template <typename Real>
[[nodiscard]] Eigen::Matrix<Real, Eigen::Dynamic, 1>
measure_all_z(const StateVector<Real> &state) {
    const auto n = state.num_qubits();
    Eigen::Matrix<Real, Eigen::Dynamic, 1> out =
        Eigen::Matrix<Real, Eigen::Dynamic, 1>::Zero(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < state.dim(); ++i) {
        const Real p = std::norm(state(i));
        for (std::size_t q = 0; q < n; ++q) {
            const bool one = (i >> state.bit_of(q)) & 1;
            out(static_cast<Eigen::Index>(q)) += one ? -p : p;
        }
    }
    return out;
}

/// Computational-basis probabilities |<k|psi>|^2.
template <typename Real>
[[nodiscard]] Eigen::Matrix<Real, Eigen::Dynamic, 1>
sampler_probabilities(const StateVector<Real> &state) {
    return state.amplitudes().cwiseAbs2();
}

} // namespace qtft::sim
