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
#include "qtft/diagnostics/gradient_suite.hpp"

#include "qtft/forecast/forecasting.hpp"
#include "qtft/qnn/variable_selection.hpp"

#include <chrono>
#include <functional>

namespace qtft::diagnostics {

namespace {

using ad::ParameterStore;
using ad::Tape;
using ad::Var;
using Clock = std::chrono::steady_clock;

Var weighted_sum(Tape &t, const Var &y, nn::Rng &rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd w(y.rows(), y.cols());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        w.data()[i] = u(rng);
    }
    return ad::sum(ad::mul(y, t.constant(std::move(w))));
}

// A check whose loss is a fixed random projection of the block output.
BlockCheck run(const std::string &name, const SuiteOptions &o,
               const std::function<void(ParameterStore &, nn::Rng &)> &build,
               const std::function<Var(Tape &)> &forward, ParameterStore &store) {
    const auto start = Clock::now();
    nn::Rng rng(o.seed);
    build(store, rng);
    const std::uint64_t proj_seed = rng();
    const auto result = ad::check_gradients(
        store,
        [&](Tape &t) {
            nn::Rng proj(proj_seed);
            return weighted_sum(t, forward(t), proj);
        },
        o.check);
    return {name, result, std::chrono::duration<double>(Clock::now() - start).count()};
}

template <class Block> struct Holder {
    std::optional<Block> block;
};

BlockCheck classical_glu(const SuiteOptions &o) {
    ParameterStore ps;
    Holder<nn::GluParams> h;
    ad::Parameter *x = nullptr;
    return run(
        "glu", o,
        [&](ParameterStore &s, nn::Rng &r) {
            h.block = nn::make_glu(s, "glu", 3, 2, r);
            x = &s.add_uniform("x", 3, 1, 1.0, r);
        },
        [&](Tape &t) { return nn::glu(t, t.leaf(*x), *h.block); }, ps);
}

BlockCheck classical_grn(const SuiteOptions &o) {
    ParameterStore ps;
    Holder<nn::GrnParams> h;
    ad::Parameter *a = nullptr;
    ad::Parameter *c = nullptr;
    return run(
        "grn", o,
        [&](ParameterStore &s, nn::Rng &r) {
            h.block = nn::make_grn(s, "grn", 2, 3, {}, r);
            a = &s.add_uniform("a", 2, 1, 1.0, r);
            c = &s.add_uniform("c", 3, 1, 1.0, r);
        },
        [&](Tape &t) { return nn::grn(t, t.leaf(*a), t.leaf(*c), *h.block); }, ps);
}

BlockCheck classical_selection(const SuiteOptions &o) {
    ParameterStore ps;
    Holder<nn::GrnSelectionParams> h;
    std::vector<ad::Parameter *> e;
    ad::Parameter *c = nullptr;
    return run(
        "variable_selection", o,
        [&](ParameterStore &s, nn::Rng &r) {
            h.block = nn::make_variable_selection<nn::GrnParams>(
                s, "vsn", 3, 2, 2, false, r,
                [&](const std::string &n, Eigen::Index w, Eigen::Index cd) {
                    return nn::make_grn(s, n, w, cd, {}, r);
                });
            for (int j = 0; j < 3; ++j) {
                e.push_back(&s.add_uniform("e" + std::to_string(j), 2, 1, 1.0, r));
            }
            c = &s.add_uniform("c", 2, 1, 1.0, r);
        },
        [&](Tape &t) {
            std::vector<Var> in;
            for (auto *p : e) {
                in.push_back(t.leaf(*p));
            }
            const auto sel = nn::variable_selection(t, in, t.leaf(*c), *h.block);
            return ad::concat({sel.selected, sel.weights});
        },
        ps);
}

BlockCheck classical_static(const SuiteOptions &o) {
    ParameterStore ps;
    std::vector<nn::GrnParams> g;
    ad::Parameter *xi = nullptr;
    return run(
        "static_encoder", o,
        [&](ParameterStore &s, nn::Rng &r) {
            for (const char *n : {"s", "e", "c", "h"}) {
                g.push_back(nn::make_grn(s, n, 2, 0, {}, r));
            }
            xi = &s.add_uniform("xi", 2, 1, 1.0, r);
        },
        [&](Tape &t) {
            const auto c =
                nn::static_covariate_encoder(t, t.leaf(*xi), {g[0], g[1], g[2], g[3]});
            return ad::concat({c.selection, c.enrichment, c.cell, c.hidden});
        },
        ps);
}

BlockCheck classical_lstm(const SuiteOptions &o) {
    ParameterStore ps;
    Holder<nn::LstmParams> h;
    ad::Parameter *xs = nullptr;
    ad::Parameter *h0 = nullptr;
    ad::Parameter *c0 = nullptr;
    return run(
        "lstm", o,
        [&](ParameterStore &s, nn::Rng &r) {
            h.block = nn::make_lstm(s, "lstm", 2, 2, r);
            xs = &s.add_uniform("xs", 2, 3, 1.0, r);
            h0 = &s.add_uniform("h0", 2, 1, 1.0, r);
            c0 = &s.add_uniform("c0", 2, 1, 1.0, r);
        },
        [&](Tape &t) {
            const Var xt = ad::transpose(t.leaf(*xs));
            const std::vector<Var> in{ad::row(xt, 0), ad::row(xt, 1), ad::row(xt, 2)};
            return ad::hstack(nn::lstm_seq(t, in, {t.leaf(*h0), t.leaf(*c0)}, *h.block));
        },
        ps);
}

BlockCheck classical_attention(const SuiteOptions &o) {
    ParameterStore ps;
    Holder<nn::AttentionParams> h;
    ad::Parameter *x = nullptr;
    return run(
        "multi_head_attention", o,
        [&](ParameterStore &s, nn::Rng &r) {
            h.block = nn::make_attention(s, "mha", 2, 2, false, r);
            x = &s.add_uniform("s", 4, 2, 1.0, r);
        },
        [&](Tape &t) { return nn::interpretable_multi_head(t, t.leaf(*x), *h.block); }, ps);
}

BlockCheck quantum_vqc(const SuiteOptions &o) {
    ParameterStore ps;
    std::vector<qnn::VqcBlockParams> blocks;
    ad::Parameter *x = nullptr;
    return run(
        "vqc", o,
        [&](ParameterStore &s, nn::Rng &r) {
            int i = 0;
            for (auto enc : {qnn::Encoding::Angle, qnn::Encoding::ZZ}) {
                for (auto ans : {qnn::Ansatz::BasicEntangler, qnn::Ansatz::NLocal}) {
                    qnn::VqcConfig c;
                    c.encoding = enc;
                    c.ansatz = ans;
                    blocks.push_back(qnn::make_vqc(s, "vqc" + std::to_string(i++), 3, c, r));
                }
            }
            x = &s.add_uniform("x", 3, 1, 1.5, r);
        },
        [&](Tape &t) {
            std::vector<Var> outs;
            const Var xv = t.leaf(*x);
            for (const auto &b : blocks) {
                outs.push_back(qnn::vqc_apply(t, xv, b));
            }
            return ad::concat(outs);
        },
        ps);
}

BlockCheck quantum_qglu(const SuiteOptions &o) {
    ParameterStore ps;
    Holder<qnn::QgluParams> h;
    ad::Parameter *x = nullptr;
    return run(
        "qglu", o,
        [&](ParameterStore &s, nn::Rng &r) {
            h.block = qnn::make_qglu(s, "qglu", 2, {}, r);
            x = &s.add_uniform("x", 2, 1, 1.5, r);
        },
        [&](Tape &t) { return qnn::qglu(t, t.leaf(*x), *h.block); }, ps);
}

BlockCheck quantum_qgrn(const SuiteOptions &o) {
    ParameterStore ps;
    Holder<qnn::QgrnParams> h;
    ad::Parameter *a = nullptr;
    ad::Parameter *c = nullptr;
    return run(
        "qgrn", o,
        [&](ParameterStore &s, nn::Rng &r) {
            qnn::VqcConfig cfg;
            cfg.encoding = qnn::Encoding::ZZ;
            cfg.ansatz = qnn::Ansatz::NLocal;
            h.block = qnn::make_qgrn(s, "qgrn", 2, 2, cfg, {}, r);
            a = &s.add_uniform("a", 2, 1, 1.0, r);
            c = &s.add_uniform("c", 2, 1, 1.0, r);
        },
        [&](Tape &t) { return qnn::qgrn(t, t.leaf(*a), t.leaf(*c), *h.block); }, ps);
}

BlockCheck quantum_selection(const SuiteOptions &o) {
    ParameterStore ps;
    Holder<qnn::QgrnSelectionParams> h;
    std::vector<ad::Parameter *> e;
    ad::Parameter *c = nullptr;
    return run(
        "q_variable_selection", o,
        [&](ParameterStore &s, nn::Rng &r) {
            h.block = nn::make_variable_selection<qnn::QgrnParams>(
                s, "qvsn", 3, 2, 2, false, r,
                [&](const std::string &n, Eigen::Index w, Eigen::Index cd) {
                    return qnn::make_qgrn(s, n, static_cast<std::size_t>(w), cd, {}, {}, r);
                });
            for (int j = 0; j < 3; ++j) {
                e.push_back(&s.add_uniform("e" + std::to_string(j), 2, 1, 1.0, r));
            }
            c = &s.add_uniform("c", 2, 1, 1.0, r);
        },
        [&](Tape &t) {
            std::vector<Var> in;
            for (auto *p : e) {
                in.push_back(t.leaf(*p));
            }
            const auto sel = qnn::q_variable_selection(t, in, t.leaf(*c), *h.block);
            return ad::concat({sel.selected, sel.weights});
        },
        ps);
}

BlockCheck quantum_attention(const SuiteOptions &o) {
    ParameterStore ps;
    Holder<qnn::QAttentionParams> h;
    ad::Parameter *x = nullptr;
    return run(
        "q_attention", o,
        [&](ParameterStore &s, nn::Rng &r) {
            h.block = qnn::make_q_attention(s, "qa", 2, 2, false, {}, r);
            x = &s.add_uniform("s", 3, 2, 1.0, r);
        },
        [&](Tape &t) { return qnn::q_interpretable_multi_head(t, t.leaf(*x), *h.block); }, ps);
}

BlockCheck quantum_lstm(const SuiteOptions &o) {
    ParameterStore ps;
    Holder<qnn::QlstmParams> h;
    ad::Parameter *xs = nullptr;
    ad::Parameter *h0 = nullptr;
    ad::Parameter *c0 = nullptr;
    return run(
        "qlstm", o,
        [&](ParameterStore &s, nn::Rng &r) {
            h.block = qnn::make_qlstm(s, "qlstm", 2, 2, {}, r);
            xs = &s.add_uniform("xs", 2, 2, 1.0, r);
            h0 = &s.add_uniform("h0", 2, 1, 1.0, r);
            c0 = &s.add_uniform("c0", 2, 1, 1.0, r);
        },
        [&](Tape &t) {
            const Var xt = ad::transpose(t.leaf(*xs));
            const std::vector<Var> in{ad::row(xt, 0), ad::row(xt, 1)};
            return ad::hstack(qnn::qlstm_seq(t, in, {t.leaf(*h0), t.leaf(*c0)}, *h.block));
        },
        ps);
}

} // namespace

BlockCheck check_model(const std::string &kind, const SuiteOptions &o) {
    const auto start = Clock::now();
    forecast::TrainConfig tc;
    tc.model_kind = model::parse_model_kind(kind);
    tc.seed = o.seed;
    const auto model = model::make_model(tc.model_config(4), o.seed);

    // A price-like window well away from the pinball kink.
    nn::Rng rng(o.seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    forecast::WindowedSample s;
    s.past.resize(2, 4);
    for (Eigen::Index i = 0; i < s.past.size(); ++i) {
        s.past.data()[i] = 2.0 * u(rng) - 1.0;
    }
    s.future_known = (Eigen::MatrixXd(2, 1) << 0.5, 0.75).finished();
    s.static_vars = Eigen::VectorXd::Ones(1);
    s.targets = (Eigen::VectorXd(2) << 25.0, 26.0).finished();

    const auto result = ad::check_gradients(
        model->params(),
        [&](Tape &t) {
            return forecast::quantile_loss(t, model->forward(t, s.inputs()), s.targets,
                                           model->config().quantiles);
        },
        o.check);
    return {kind, result, std::chrono::duration<double>(Clock::now() - start).count()};
}

std::vector<BlockCheck> run_gradient_suite(const SuiteOptions &o) {
    std::vector<BlockCheck> out{
        classical_glu(o),      classical_grn(o),       classical_selection(o),
        classical_static(o),   classical_lstm(o),      classical_attention(o),
        quantum_vqc(o),        quantum_qglu(o),        quantum_qgrn(o),
        quantum_selection(o),  quantum_attention(o),   quantum_lstm(o),
    };
    if (o.include_models) {
        for (const char *kind : {"tft", "qtft", "qtft-qlstm"}) {
            out.push_back(check_model(kind, o));
        }
    }
    return out;
}

} // namespace qtft::diagnostics
