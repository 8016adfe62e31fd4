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
#include "qtft/qnn/blocks.hpp"

#include "qtft/error.hpp"
#include "qtft/sim/templates.hpp"

#include <numbers>

namespace qtft::qnn {

namespace {

void check_width(const Var &x, std::size_t width, const char *what) {
    if (x.cols() != 1 || x.rows() != static_cast<Eigen::Index>(width)) {
        throw ShapeError(std::string(what) + ": expected width " + std::to_string(width) +
                         ", got " + std::to_string(x.rows()) + "x" +
                         std::to_string(x.cols()));
    }
}

} // namespace

sim::ParameterizedCircuit encoding_circuit(std::size_t width, const VqcConfig &cfg) {
    switch (cfg.encoding) {
    case Encoding::ZZ:
        return sim::zz_feature_map(width, cfg.zz_reps);
    case Encoding::Angle:
        break;
    }
    return sim::angle_embedding(width, cfg.embedding_rotation);
}

sim::ParameterizedCircuit ansatz_circuit(std::size_t width, const VqcConfig &cfg) {
    if (cfg.ansatz == Ansatz::NLocal) {
        if (width >= 2) {
            return sim::n_local(width, cfg.layers);
        }
        return sim::basic_entangler_layers(1, cfg.layers + 1, sim::Rotation::RY);
    }
    return sim::basic_entangler_layers(width, cfg.layers, cfg.entangler_rotation);
}

VqcBlockParams make_vqc(ParameterStore &store, const std::string &name, std::size_t width,
                        const VqcConfig &cfg, Rng &rng, bool with_encoding) {
    VqcBlockParams p;
    const auto ansatz = ansatz_circuit(width, cfg);
    p.circuit = with_encoding ? compose(encoding_circuit(width, cfg), ansatz) : ansatz;
    p.weights = &store.add_uniform(name + ".theta",
                                   static_cast<Eigen::Index>(p.circuit.num_weight_slots()), 1,
                                   std::numbers::pi, rng);
    return p;
}

Var vqc_apply(Tape &tape, const Var &x, const VqcBlockParams &p) {
    check_width(x, p.width(), "vqc_apply");
    if (p.circuit.num_feature_slots() != p.width()) {
        throw ShapeError("vqc_apply: block has no encoding stage");
    }
    return ad::expval_z(p.circuit, x, tape.leaf(*p.weights));
}

QgluParams make_qglu(ParameterStore &store, const std::string &name, std::size_t width,
                     const VqcConfig &cfg, Rng &rng, bool with_encoding) {
    return {make_vqc(store, name + ".gate", width, cfg, rng, with_encoding),
            make_vqc(store, name + ".lin", width, cfg, rng, with_encoding)};
}

Var qglu(Tape &tape, const Var &x, const QgluParams &p) {
    return ad::mul(ad::sigmoid(vqc_apply(tape, x, p.gate)), vqc_apply(tape, x, p.lin));
}

Var qglu(Tape &tape, const PreparedState &state, const QgluParams &p) {
    auto branch = [&](const VqcBlockParams &b) {
        if (b.circuit.num_feature_slots() != 0 || b.width() != state.prefix.num_qubits()) {
            throw ShapeError("qglu: branch must be an ansatz of the prepared width");
        }
        const auto full = compose(state.prefix, b.circuit);
        return ad::expval_z(full, state.features,
                            ad::concat({state.weights, tape.leaf(*b.weights)}));
    };
    return ad::mul(ad::sigmoid(branch(p.gate)), branch(p.lin));
}

QgrnParams make_qgrn(ParameterStore &store, const std::string &name, std::size_t width,
                     Eigen::Index context_dim, const VqcConfig &cfg, nn::LayerNormConfig norm,
                     Rng &rng) {
    QgrnParams p;
    const auto w = static_cast<Eigen::Index>(width);
    p.vqc_a = make_vqc(store, name + ".a", width, cfg, rng);
    if (context_dim > 0) {
        if (context_dim != w) {
            p.context_proj =
                nn::make_dense(store, name + ".context_proj", context_dim, w, false, rng);
        }
        p.vqc_c = make_vqc(store, name + ".c", width, cfg, rng);
    }
    p.eta2_prefix = compose(encoding_circuit(width, cfg), ansatz_circuit(width, cfg));
    p.eta2_weights = &store.add_uniform(
        name + ".eta2.theta", static_cast<Eigen::Index>(p.eta2_prefix.num_weight_slots()), 1,
        std::numbers::pi, rng);
    p.qglu = make_qglu(store, name + ".qglu", width, cfg, rng, false);
    p.norm = nn::make_layer_norm(store, name + ".norm", w, norm);
    return p;
}

Var qgrn(Tape &tape, const Var &a, const std::optional<Var> &c, const QgrnParams &p) {
    check_width(a, p.width(), "qgrn");
    Var pre = vqc_apply(tape, a, p.vqc_a);
    if (c && p.vqc_c) {
        const Var ctx = p.context_proj ? nn::dense(tape, *p.context_proj, *c) : *c;
        pre = ad::add(pre, vqc_apply(tape, ctx, *p.vqc_c));
    }
    const Var eta1 = ad::elu(pre);
    const PreparedState eta2{p.eta2_prefix, eta1, tape.leaf(*p.eta2_weights)};
    return nn::layer_norm(tape, ad::add(a, qglu(tape, eta2, p.qglu)), p.norm);
}

QAttentionParams make_q_attention(ParameterStore &store, const std::string &name,
                                  std::size_t width, std::size_t heads, bool causal,
                                  const VqcConfig &cfg, Rng &rng) {
    if (heads == 0) {
        throw ConfigError("attention needs at least one head");
    }
    QAttentionParams p;
    p.causal = causal;
    for (std::size_t h = 0; h < heads; ++h) {
        const auto tag = std::to_string(h);
        p.query.push_back(make_vqc(store, name + ".query" + tag, width, cfg, rng));
        p.key.push_back(make_vqc(store, name + ".key" + tag, width, cfg, rng));
    }
    p.value = make_vqc(store, name + ".value", width, cfg, rng);
    return p;
}

QProjections q_project(Tape &tape, const Var &s, const QAttentionParams &p) {
    if (s.cols() != static_cast<Eigen::Index>(p.value.width())) {
        throw ShapeError("q_interpretable_multi_head: row width mismatch");
    }
    auto project = [&](const VqcBlockParams &b) {
        std::vector<Var> rows;
        rows.reserve(static_cast<std::size_t>(s.rows()));
        for (Eigen::Index i = 0; i < s.rows(); ++i) {
            rows.push_back(vqc_apply(tape, ad::row(s, i), b));
        }
        return ad::stack_rows(rows);
    };
    QProjections out;
    out.value = project(p.value);
    for (std::size_t h = 0; h < p.heads(); ++h) {
        out.query.push_back(project(p.query[h]));
        out.key.push_back(project(p.key[h]));
    }
    return out;
}

Var q_interpretable_multi_head(Tape &tape, const Var &s, const QAttentionParams &p) {
    const auto proj = q_project(tape, s, p);
    const auto d_attn = static_cast<double>(p.value.width());
    std::vector<Var> heads;
    heads.reserve(p.heads());
    for (std::size_t h = 0; h < p.heads(); ++h) {
        heads.push_back(
            nn::attention(tape, proj.query[h], proj.key[h], proj.value, d_attn, p.causal));
    }
    return ad::average(heads);
}

QlstmParams make_qlstm(ParameterStore &store, const std::string &name, Eigen::Index input_dim,
                       std::size_t width, const VqcConfig &cfg, Rng &rng) {
    QlstmParams p;
    p.input_dim = input_dim;
    p.hidden = static_cast<Eigen::Index>(width);
    p.projection =
        nn::make_dense(store, name + ".projection", input_dim + p.hidden, p.hidden, true, rng);
    p.input_gate = make_vqc(store, name + ".input", width, cfg, rng);
    p.forget_gate = make_vqc(store, name + ".forget", width, cfg, rng);
    p.cell_gate = make_vqc(store, name + ".cell", width, cfg, rng);
    p.output_gate = make_vqc(store, name + ".output", width, cfg, rng);
    return p;
}

nn::LstmState qlstm_step(Tape &tape, const Var &x, const nn::LstmState &state,
                         const QlstmParams &p) {
    check_width(x, static_cast<std::size_t>(p.input_dim), "qlstm input");
    check_width(state.h, static_cast<std::size_t>(p.hidden), "qlstm hidden");
    check_width(state.c, static_cast<std::size_t>(p.hidden), "qlstm cell");
    const Var z = nn::dense(tape, p.projection, ad::concat({x, state.h}));
    const Var i = ad::sigmoid(vqc_apply(tape, z, p.input_gate));
    const Var f = ad::sigmoid(vqc_apply(tape, z, p.forget_gate));
    const Var g = ad::tanh(vqc_apply(tape, z, p.cell_gate));
    const Var o = ad::sigmoid(vqc_apply(tape, z, p.output_gate));
    const Var c = ad::add(ad::mul(f, state.c), ad::mul(i, g));
    return {ad::mul(o, ad::tanh(c)), c};
}

std::vector<Var> qlstm_seq(Tape &tape, std::span<const Var> inputs,
                           const nn::LstmState &initial, const QlstmParams &p,
                           nn::LstmState *last) {
    if (inputs.empty()) {
        throw ShapeError("qlstm_seq: empty sequence");
    }
    std::vector<Var> out;
    nn::LstmState s = initial;
    for (const auto &x : inputs) {
        s = qlstm_step(tape, x, s, p);
        out.push_back(s.h);
    }
    if (last != nullptr) {
        *last = s;
    }
    return out;
}

} // namespace qtft::qnn
