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
 * Classical Temporal Fusion Transformer building blocks on the tape.
 */
#pragma once

#include "qtft/ad/ops.hpp"

#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace qtft::nn {

using ad::Parameter;
using ad::ParameterStore;
using ad::Tape;
using ad::Var;
using Rng = std::mt19937_64;

struct LayerNormConfig {
    double eps = 1e-5;
    bool affine = false;
};

struct LayerNormParams {
    LayerNormConfig config;
    Parameter *gain = nullptr;   // only when affine
    Parameter *offset = nullptr; // only when affine
};

LayerNormParams make_layer_norm(ParameterStore &store, const std::string &name,
                                Eigen::Index dim, LayerNormConfig config);
[[nodiscard]] Var layer_norm(Tape &tape, const Var &x, const LayerNormParams &p);

/// y = W x (+ b). Weights and biases start in U(-1/sqrt(in), 1/sqrt(in)).
struct DenseParams {
    Parameter *weight = nullptr;
    Parameter *bias = nullptr;
    Eigen::Index in = 0;
    Eigen::Index out = 0;
};

DenseParams make_dense(ParameterStore &store, const std::string &name, Eigen::Index in,
                       Eigen::Index out, bool bias, Rng &rng);
[[nodiscard]] Var dense(Tape &tape, const DenseParams &p, const Var &x);

/// sigmoid(W4 x + b4) * (W5 x + b5)
struct GluParams {
    DenseParams gate;
    DenseParams lin;
};

GluParams make_glu(ParameterStore &store, const std::string &name, Eigen::Index in,
                   Eigen::Index out, Rng &rng);
[[nodiscard]] Var glu(Tape &tape, const Var &x, const GluParams &p);

/// LayerNorm(a + GLU(W3 ELU(W1 a + W2 c + b12) + b3)).
struct GrnParams {
    DenseParams primary;
    std::optional<DenseParams> context; // W2, no bias
    DenseParams out;
    GluParams glu;
    LayerNormParams norm;

    [[nodiscard]] Eigen::Index dim() const noexcept { return primary.in; }
};

/// `context_dim` 0 builds a GRN without a context input.
GrnParams make_grn(ParameterStore &store, const std::string &name, Eigen::Index dim,
                   Eigen::Index context_dim, LayerNormConfig norm, Rng &rng);
/// `c` may be omitted; a GRN built without a context ignores it.
[[nodiscard]] Var grn(Tape &tape, const Var &a, const std::optional<Var> &c,
                      const GrnParams &p);

struct LstmParams {
    DenseParams input_gate;  // [x; h] -> hidden
    DenseParams forget_gate;
    DenseParams cell_gate;
    DenseParams output_gate;
    Eigen::Index input_dim = 0;
    Eigen::Index hidden = 0;
};

struct LstmState {
    Var h;
    Var c;
};

LstmParams make_lstm(ParameterStore &store, const std::string &name, Eigen::Index input_dim,
                     Eigen::Index hidden, Rng &rng);
[[nodiscard]] LstmState lstm_step(Tape &tape, const Var &x, const LstmState &state,
                                  const LstmParams &p);
/// Hidden output for every step; the final state is written to `last` when
/// given.
[[nodiscard]] std::vector<Var> lstm_seq(Tape &tape, std::span<const Var> inputs,
                                        const LstmState &initial, const LstmParams &p,
                                        LstmState *last = nullptr);

/// softmax(Q K^T / sqrt(d_attn)) V, row-wise. With `causal`, position i only
/// attends to positions j <= i.
[[nodiscard]] Var attention(Tape &tape, const Var &q, const Var &k, const Var &v,
                            double d_attn, bool causal = false);

/// Head-averaged attention with one shared value projection.
struct AttentionParams {
    std::vector<Parameter *> query; // d_model x d_attn each
    std::vector<Parameter *> key;
    Parameter *value = nullptr;   // d_model x d_attn
    Parameter *combine = nullptr; // d_attn x d_model
    Eigen::Index d_attn = 1;
    bool causal = false;

    [[nodiscard]] std::size_t heads() const noexcept { return query.size(); }
};

AttentionParams make_attention(ParameterStore &store, const std::string &name,
                               Eigen::Index d_model, std::size_t heads, bool causal,
                               Rng &rng);
/// `s` is positions x d_model.
[[nodiscard]] Var interpretable_multi_head(Tape &tape, const Var &s,
                                           const AttentionParams &p);

/// ceil(d_model / heads), at least 1.
[[nodiscard]] Eigen::Index attention_width(Eigen::Index d_model, std::size_t heads);

} // namespace qtft::nn
