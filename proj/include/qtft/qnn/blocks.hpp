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
 * Variational-circuit counterparts of the fusion-transformer blocks.
 *
 * Every block runs on `width` qubits and reads out one Pauli-Z expectation per
 * qubit, so inputs and outputs share the same width. Circuit angles start in
 * U(-pi, pi).
 */
#pragma once

#include "qtft/ad/quantum.hpp"
#include "qtft/nn/layers.hpp"
#include "qtft/sim/circuit.hpp"

namespace qtft::qnn {

using ad::Parameter;
using ad::ParameterStore;
using ad::Tape;
using ad::Var;
using nn::Rng;

enum class Encoding { Angle, ZZ };
enum class Ansatz { BasicEntangler, NLocal };

struct VqcConfig {
    Encoding encoding = Encoding::Angle;
    sim::Rotation embedding_rotation = sim::Rotation::RX;
    std::size_t zz_reps = 1;
    Ansatz ansatz = Ansatz::BasicEntangler;
    sim::Rotation entangler_rotation = sim::Rotation::RY;
    std::size_t layers = 2;
};

[[nodiscard]] sim::ParameterizedCircuit encoding_circuit(std::size_t width,
                                                         const VqcConfig &cfg);
/// The N-local template needs two qubits; on one qubit it degenerates to
/// layers + 1 RY rotations.
[[nodiscard]] sim::ParameterizedCircuit ansatz_circuit(std::size_t width,
                                                       const VqcConfig &cfg);

/// Encoding followed by ansatz, measured on every qubit.
struct VqcBlockParams {
    sim::ParameterizedCircuit circuit;
    Parameter *weights = nullptr;

    [[nodiscard]] std::size_t width() const noexcept { return circuit.num_qubits(); }
};

/// `with_encoding = false` builds an ansatz-only block that acts on a
/// prepared state.
VqcBlockParams make_vqc(ParameterStore &store, const std::string &name, std::size_t width,
                        const VqcConfig &cfg, Rng &rng, bool with_encoding = true);

[[nodiscard]] Var vqc_apply(Tape &tape, const Var &x, const VqcBlockParams &p);

/// A quantum state that has not been measured yet: the circuit that prepares
/// it together with its bindings. Measuring branches re-run the prefix.
struct PreparedState {
    sim::ParameterizedCircuit prefix;
    Var features;
    Var weights;
};

/// sigmoid(gamma') * gamma'' with gamma', gamma'' the readouts of two blocks.
struct QgluParams {
    VqcBlockParams gate;
    VqcBlockParams lin;
};

QgluParams make_qglu(ParameterStore &store, const std::string &name, std::size_t width,
                     const VqcConfig &cfg, Rng &rng, bool with_encoding = true);

/// Classical input: each branch encodes x itself.
[[nodiscard]] Var qglu(Tape &tape, const Var &x, const QgluParams &p);
/// Prepared input: the encoding step is skipped and each branch ansatz is
/// appended to the prefix (two executions sharing the same prefix gates).
[[nodiscard]] Var qglu(Tape &tape, const PreparedState &state, const QgluParams &p);

/// LayerNorm(a + QGLU(|eta2>)), eta2 = Ansatz(Encode(ELU(a'' + c''))).
struct QgrnParams {
    VqcBlockParams vqc_a;
    std::optional<VqcBlockParams> vqc_c;
    /// Maps a context of different width onto the block width.
    std::optional<nn::DenseParams> context_proj;
    sim::ParameterizedCircuit eta2_prefix; // encoding + ansatz, weights = eta2
    Parameter *eta2_weights = nullptr;
    QgluParams qglu; // ansatz-only branches
    nn::LayerNormParams norm;

    [[nodiscard]] std::size_t width() const noexcept { return vqc_a.width(); }
};

/// `context_dim` 0 builds a block without a context branch.
QgrnParams make_qgrn(ParameterStore &store, const std::string &name, std::size_t width,
                     Eigen::Index context_dim, const VqcConfig &cfg,
                     nn::LayerNormConfig norm, Rng &rng);

/// Without `c` the context circuit is skipped and c'' = 0.
[[nodiscard]] Var qgrn(Tape &tape, const Var &a, const std::optional<Var> &c,
                       const QgrnParams &p);

/// Per-head query and key circuits, one shared value circuit, head-averaged
/// attention with d_attn = width and no output projection.
struct QAttentionParams {
    std::vector<VqcBlockParams> query;
    std::vector<VqcBlockParams> key;
    VqcBlockParams value;
    bool causal = false;

    [[nodiscard]] std::size_t heads() const noexcept { return query.size(); }
};

QAttentionParams make_q_attention(ParameterStore &store, const std::string &name,
                                  std::size_t width, std::size_t heads, bool causal,
                                  const VqcConfig &cfg, Rng &rng);

/// Projects every row of `s` (positions x width) through the circuits.
struct QProjections {
    std::vector<Var> query;
    std::vector<Var> key;
    Var value;
};
[[nodiscard]] QProjections q_project(Tape &tape, const Var &s, const QAttentionParams &p);

[[nodiscard]] Var q_interpretable_multi_head(Tape &tape, const Var &s,
                                             const QAttentionParams &p);

/// LSTM whose four gate maps are (shared projection of [x; h] to the qubit
/// width) -> variational block -> readout; sigmoid/tanh stay classical.
struct QlstmParams {
    nn::DenseParams projection;
    VqcBlockParams input_gate;
    VqcBlockParams forget_gate;
    VqcBlockParams cell_gate;
    VqcBlockParams output_gate;
    Eigen::Index input_dim = 0;
    Eigen::Index hidden = 0;
};

QlstmParams make_qlstm(ParameterStore &store, const std::string &name, Eigen::Index input_dim,
                       std::size_t width, const VqcConfig &cfg, Rng &rng);
[[nodiscard]] nn::LstmState qlstm_step(Tape &tape, const Var &x, const nn::LstmState &state,
                                       const QlstmParams &p);
[[nodiscard]] std::vector<Var> qlstm_seq(Tape &tape, std::span<const Var> inputs,
                                         const nn::LstmState &initial, const QlstmParams &p,
                                         nn::LstmState *last = nullptr);

} // namespace qtft::qnn
