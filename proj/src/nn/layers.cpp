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
#include "qtft/nn/layers.hpp"

#include "qtft/error.hpp"

#include <cmath>
#include <limits>

namespace qtft::nn {

namespace {

void check_width(const Var &x, Eigen::Index expect, const char *what) {
    if (x.cols() != 1 || x.rows() != expect) {
        throw ShapeError(std::string(what) + ": expected length " + std::to_string(expect) +
                         ", got " + std::to_string(x.rows()) + "x" +
                         std::to_string(x.cols()));
    }
}

} // namespace

LayerNormParams make_layer_norm(ParameterStore &store, const std::string &name,
                                Eigen::Index dim, LayerNormConfig config) {
    LayerNormParams p{config, nullptr, nullptr};
    if (config.affine) {
        p.gain = &store.add(name + ".gain", Eigen::MatrixXd::Ones(dim, 1));
        p.offset = &store.add(name + ".offset", Eigen::MatrixXd::Zero(dim, 1));
    }
    return p;
}

Var layer_norm(Tape &tape, const Var &x, const LayerNormParams &p) {
    Var y = ad::layer_norm(x, p.config.eps);
    if (p.config.affine) {
        y = ad::add(ad::mul(y, tape.leaf(*p.gain)), tape.leaf(*p.offset));
    }
    return y;
}

DenseParams make_dense(ParameterStore &store, const std::string &name, Eigen::Index in,
                       Eigen::Index out, bool bias, Rng &rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    DenseParams p;
    p.in = in;
    p.out = out;
    p.weight = &store.add_uniform(name + ".weight", out, in, bound, rng);
    if (bias) {
        p.bias = &store.add_uniform(name + ".bias", out, 1, bound, rng);
    }
    return p;
}

Var dense(Tape &tape, const DenseParams &p, const Var &x) {
    check_width(x, p.in, "dense");
    if (p.bias != nullptr) {
        return ad::affine(tape.leaf(*p.weight), x, tape.leaf(*p.bias));
    }
    return ad::affine(tape.leaf(*p.weight), x);
}

GluParams make_glu(ParameterStore &store, const std::string &name, Eigen::Index in,
                   Eigen::Index out, Rng &rng) {
    GluParams p;
    p.gate = make_dense(store, name + ".gate", in, out, true, rng);
    p.lin = make_dense(store, name + ".lin", in, out, true, rng);
    return p;
}

Var glu(Tape &tape, const Var &x, const GluParams &p) {
    return ad::mul(ad::sigmoid(dense(tape, p.gate, x)), dense(tape, p.lin, x));
}

GrnParams make_grn(ParameterStore &store, const std::string &name, Eigen::Index dim,
                   Eigen::Index context_dim, LayerNormConfig norm, Rng &rng) {
    GrnParams p;
    p.primary = make_dense(store, name + ".primary", dim, dim, true, rng);
    if (context_dim > 0) {
        p.context = make_dense(store, name + ".context", context_dim, dim, false, rng);
    }
    p.out = make_dense(store, name + ".out", dim, dim, true, rng);
    p.glu = make_glu(store, name + ".glu", dim, dim, rng);
    p.norm = make_layer_norm(store, name + ".norm", dim, norm);
    return p;
}

Var grn(Tape &tape, const Var &a, const std::optional<Var> &c, const GrnParams &p) {
    check_width(a, p.dim(), "grn");
    Var pre = dense(tape, p.primary, a);
    if (c && p.context) {
        pre = ad::add(pre, dense(tape, *p.context, *c));
    }
    const Var eta1 = ad::elu(pre);
    const Var eta2 = dense(tape, p.out, eta1);
    return layer_norm(tape, ad::add(a, glu(tape, eta2, p.glu)), p.norm);
}

LstmParams make_lstm(ParameterStore &store, const std::string &name, Eigen::Index input_dim,
                     Eigen::Index hidden, Rng &rng) {
    LstmParams p;
    p.input_dim = input_dim;
    p.hidden = hidden;
    const Eigen::Index in = input_dim + hidden;
    p.input_gate = make_dense(store, name + ".input", in, hidden, true, rng);
    p.forget_gate = make_dense(store, name + ".forget", in, hidden, true, rng);
    p.cell_gate = make_dense(store, name + ".cell", in, hidden, true, rng);
    p.output_gate = make_dense(store, name + ".output", in, hidden, true, rng);
    return p;
}

LstmState lstm_step(Tape &tape, const Var &x, const LstmState &state, const LstmParams &p) {
    check_width(x, p.input_dim, "lstm input");
    check_width(state.h, p.hidden, "lstm hidden");
    check_width(state.c, p.hidden, "lstm cell");
    const Var xh = ad::concat({x, state.h});
    const Var i = ad::sigmoid(dense(tape, p.input_gate, xh));
    const Var f = ad::sigmoid(dense(tape, p.forget_gate, xh));
    const Var g = ad::tanh(dense(tape, p.cell_gate, xh));
    const Var o = ad::sigmoid(dense(tape, p.output_gate, xh));
    const Var c = ad::add(ad::mul(f, state.c), ad::mul(i, g));
    return {ad::mul(o, ad::tanh(c)), c};
}

std::vector<Var> lstm_seq(Tape &tape, std::span<const Var> inputs, const LstmState &initial,
                          const LstmParams &p, LstmState *last) {
    if (inputs.empty()) {
        throw ShapeError("lstm_seq: empty sequence");
    }
    std::vector<Var> out;
    out.reserve(inputs.size());
    LstmState s = initial;
    for (const auto &x : inputs) {
        s = lstm_step(tape, x, s, p);
        out.push_back(s.h);
    }
    if (last != nullptr) {
        *last = s;
    }
    return out;
}

Var attention(Tape &tape, const Var &q, const Var &k, const Var &v, double d_attn,
              bool causal) {
    if (q.cols() != k.cols() || k.rows() != v.rows()) {
        throw ShapeError("attention: Q/K column or K/V row mismatch");
    }
    Var scores = ad::scale(ad::matmul(q, ad::transpose(k)), 1.0 / std::sqrt(d_attn));
    if (causal) {
        Eigen::MatrixXd mask = Eigen::MatrixXd::Zero(q.rows(), k.rows());
        for (Eigen::Index i = 0; i < q.rows(); ++i) {
            for (Eigen::Index j = i + 1; j < k.rows(); ++j) {
                mask(i, j) = -std::numeric_limits<double>::infinity();
            }
        }
        scores = ad::add(scores, tape.constant(std::move(mask)));
    }
    return ad::matmul(ad::softmax_rows(scores), v);
}

Eigen::Index attention_width(Eigen::Index d_model, std::size_t heads) {
    const auto h = static_cast<Eigen::Index>(heads);
    return std::max<Eigen::Index>(1, (d_model + h - 1) / h);
}

AttentionParams make_attention(ParameterStore &store, const std::string &name,
                               Eigen::Index d_model, std::size_t heads, bool causal,
                               Rng &rng) {
    if (heads == 0) {
        throw ConfigError("attention needs at least one head");
    }
    AttentionParams p;
    p.d_attn = attention_width(d_model, heads);
    p.causal = causal;
    const double bound = 1.0 / std::sqrt(static_cast<double>(d_model));
    for (std::size_t h = 0; h < heads; ++h) {
        const auto tag = std::to_string(h);
        p.query.push_back(&store.add_uniform(name + ".query" + tag, d_model, p.d_attn, bound, rng));
        p.key.push_back(&store.add_uniform(name + ".key" + tag, d_model, p.d_attn, bound, rng));
    }
    p.value = &store.add_uniform(name + ".value", d_model, p.d_attn, bound, rng);
    p.combine = &store.add_uniform(name + ".combine", p.d_attn, d_model,
                                   1.0 / std::sqrt(static_cast<double>(p.d_attn)), rng);
    return p;
}

Var interpretable_multi_head(Tape &tape, const Var &s, const AttentionParams &p) {
    if (s.cols() != p.value->value.rows()) {
        throw ShapeError("interpretable_multi_head: input width mismatch");
    }
    const Var v = ad::matmul(s, tape.leaf(*p.value));
    std::vector<Var> heads;
    heads.reserve(p.heads());
    for (std::size_t h = 0; h < p.heads(); ++h) {
        const Var q = ad::matmul(s, tape.leaf(*p.query[h]));
        const Var k = ad::matmul(s, tape.leaf(*p.key[h]));
        heads.push_back(attention(tape, q, k, v, static_cast<double>(p.d_attn), p.causal));
    }
    return ad::matmul(ad::average(heads), tape.leaf(*p.combine));
}

} // namespace qtft::nn
