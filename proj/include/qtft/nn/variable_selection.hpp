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
 * Variable selection and static covariate encoding, generic over the gated
 * residual block that does the work (classical GRN or its quantum
 * counterpart).
 *
 * Selection weights are softmax(R_w(F Xi, c_s)) where Xi is the flattened
 * concatenation of the m embeddings, F a dense map m*d -> m and R_w a
 * residual block of width m. The selected vector is sum_j v_j R_j(xi_j).
 * With m = 1 there is no weight network and the single weight is 1.
 */
#pragma once

#include "qtft/error.hpp"
#include "qtft/nn/layers.hpp"

#include <array>
#include <concepts>

namespace qtft::nn {

template <class Block>
struct VariableSelectionParams {
    std::vector<Block> per_variable; // size 1 when shared across variables
    std::optional<DenseParams> flatten;
    std::optional<Block> weight_block;
    bool shared = false;

    [[nodiscard]] const Block &processor(std::size_t j) const {
        return shared ? per_variable.front() : per_variable.at(j);
    }
};

struct Selection {
    Var selected; // d_model
    Var weights;  // m
};

/// Applies `block(tape, params, a, context)` -> Var.
template <class Block, class Apply>
    requires std::invocable<const Apply &, Tape &, const Block &, const Var &,
                            const std::optional<Var> &>
[[nodiscard]] Selection select_variables(Tape &tape, std::span<const Var> embeddings,
                                         const std::optional<Var> &context,
                                         const VariableSelectionParams<Block> &p,
                                         const Apply &apply) {
    const std::size_t m = embeddings.size();
    if (m == 0) {
        throw qtft::ShapeError("variable selection needs at least one variable");
    }
    if (!p.shared && p.per_variable.size() != m) {
        throw qtft::ShapeError("variable selection: expected " +
                         std::to_string(p.per_variable.size()) + " variables, got " +
                         std::to_string(m));
    }
    std::vector<Var> processed;
    processed.reserve(m);
    for (std::size_t j = 0; j < m; ++j) {
        processed.push_back(apply(tape, p.processor(j), embeddings[j], std::nullopt));
    }
    if (m == 1) {
        return {processed.front(), tape.constant(Eigen::MatrixXd::Ones(1, 1))};
    }
    const Var flat = dense(tape, *p.flatten, ad::concat(embeddings));
    const Var weights = ad::softmax(apply(tape, *p.weight_block, flat, context));
    const Var selected = ad::matmul(ad::hstack(processed), weights);
    return {selected, weights};
}

/// `make(name, width, context_dim)` builds one residual block.
template <class Block, class Make>
[[nodiscard]] VariableSelectionParams<Block>
make_variable_selection(ParameterStore &store, const std::string &name, std::size_t m,
                        Eigen::Index d_model, Eigen::Index context_dim, bool shared,
                        Rng &rng, const Make &make) {
    VariableSelectionParams<Block> p;
    p.shared = shared;
    const std::size_t count = shared ? 1 : m;
    for (std::size_t j = 0; j < count; ++j) {
        p.per_variable.push_back(make(name + ".var" + std::to_string(j), d_model, 0));
    }
    if (m > 1) {
        const auto width = static_cast<Eigen::Index>(m);
        p.flatten = make_dense(store, name + ".flatten", width * d_model, width, true, rng);
        p.weight_block = make(name + ".weights", width, context_dim);
    }
    return p;
}

/// Context vectors c_s, c_e, c_c, c_h from four independent blocks.
struct StaticContexts {
    Var selection; // c_s
    Var enrichment; // c_e
    Var cell;       // c_c
    Var hidden;     // c_h
};

template <class Block, class Apply>
[[nodiscard]] StaticContexts encode_static(Tape &tape, const Var &xi,
                                           const std::array<Block, 4> &encoders,
                                           const Apply &apply) {
    return {apply(tape, encoders[0], xi, std::nullopt),
            apply(tape, encoders[1], xi, std::nullopt),
            apply(tape, encoders[2], xi, std::nullopt),
            apply(tape, encoders[3], xi, std::nullopt)};
}

// Classical entry points.

using GrnSelectionParams = VariableSelectionParams<GrnParams>;

[[nodiscard]] inline Selection variable_selection(Tape &tape, std::span<const Var> embeddings,
                                                  const std::optional<Var> &context,
                                                  const GrnSelectionParams &p) {
    return select_variables(tape, embeddings, context, p,
                            [](Tape &t, const GrnParams &g, const Var &a,
                               const std::optional<Var> &c) { return grn(t, a, c, g); });
}

[[nodiscard]] inline StaticContexts
static_covariate_encoder(Tape &tape, const Var &xi, const std::array<GrnParams, 4> &encoders) {
    return encode_static(tape, xi, encoders,
                         [](Tape &t, const GrnParams &g, const Var &a,
                            const std::optional<Var> &c) { return grn(t, a, c, g); });
}

} // namespace qtft::nn
