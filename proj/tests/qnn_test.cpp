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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qtft/ad/gradcheck.hpp"
#include "qtft/qnn/variable_selection.hpp"
#include "qtft/sim/state_vector.hpp"
#include "support/dense_oracle.hpp"

#include <cmath>

using namespace qtft;
using namespace qtft::ad;
using namespace qtft::qnn;

namespace {

Eigen::MatrixXd col(std::initializer_list<double> v) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(v.size()), 1);
    Eigen::Index i = 0;
    for (double x : v) {
        out(i++, 0) = x;
    }
    return out;
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

bool in_hull(const Eigen::VectorXd &x, const Eigen::MatrixXd &rows, double tol = 1e-12) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x(i) < rows.col(i).minCoeff() - tol || x(i) > rows.col(i).maxCoeff() + tol) {
            return false;
        }
    }
    return true;
}

std::vector<VqcConfig> all_configs() {
    std::vector<VqcConfig> out;
    for (auto enc : {Encoding::Angle, Encoding::ZZ}) {
        for (auto ans : {Ansatz::BasicEntangler, Ansatz::NLocal}) {
            VqcConfig c;
            c.encoding = enc;
            c.ansatz = ans;
            out.push_back(c);
        }
    }
    return out;
}

} // namespace

TEST_CASE("vqc_apply") {
    Rng rng(11);
    ParameterStore ps;
    const VqcConfig cfg;
    const auto p = make_vqc(ps, "vqc", 2, cfg, rng);
    Tape t;

    SUBCASE("identity circuit on |00> measures +1") {
        p.weights->value.setZero();
        const Eigen::MatrixXd y = vqc_apply(t, t.constant(Eigen::MatrixXd::Zero(2, 1)), p).value();
        CHECK(std::abs(y(0) - 1.0) < 1e-15);
        CHECK(std::abs(y(1) - 1.0) < 1e-15);
    }
    SUBCASE("bounded and equal to the dense oracle") {
        std::uniform_real_distribution<double> u(-4.0, 4.0);
        for (const auto &c : all_configs()) {
            ParameterStore local;
            const auto q = make_vqc(local, "q", 2, c, rng);
            for (int trial = 0; trial < 10; ++trial) {
                const Eigen::VectorXd x = col({u(rng), u(rng)});
                const Eigen::VectorXd y = vqc_apply(t, t.constant(x), q).value();
                CHECK((y.array().abs() <= 1.0 + 1e-15).all());
                const auto psi = oracle::run(q.circuit, x, q.weights->value);
                for (std::size_t k = 0; k < 2; ++k) {
                    CHECK(std::abs(y(static_cast<Eigen::Index>(k)) -
                                   oracle::z_expectation(psi, 2, k)) < 1e-10);
                }
            }
        }
    }
    SUBCASE("width mismatch") {
        CHECK_THROWS_AS((void)vqc_apply(t, t.constant(Eigen::MatrixXd::Zero(3, 1)), p),
                        ShapeError);
    }
}

TEST_CASE("qglu") {
    Rng rng(12);
    ParameterStore ps;
    const VqcConfig cfg;
    const auto p = make_qglu(ps, "qglu", 2, cfg, rng);
    Tape t;

    SUBCASE("identity branches on zero input") {
        p.gate.weights->value.setZero();
        p.lin.weights->value.setZero();
        const Eigen::MatrixXd y = qglu(t, t.constant(Eigen::MatrixXd::Zero(2, 1)), p).value();
        CHECK(y(0) == doctest::Approx(logistic(1.0)).epsilon(1e-14));
        CHECK(y(1) == doctest::Approx(0.7310585786300049).epsilon(1e-14));
    }
    SUBCASE("output magnitude at most one") {
        std::uniform_real_distribution<double> u(-5.0, 5.0);
        for (int trial = 0; trial < 30; ++trial) {
            p.gate.weights->value = Eigen::MatrixXd::Random(p.gate.weights->value.rows(), 1) * 3;
            const Eigen::MatrixXd y = qglu(t, t.constant(col({u(rng), u(rng)})), p).value();
            CHECK((y.array().abs() <= 1.0).all());
        }
    }
    SUBCASE("prepared state equals classical encoding when the prefix is the encoder") {
        ParameterStore local;
        const auto bare = make_qglu(local, "bare", 2, cfg, rng, false);
        QgluParams full = p;
        full.gate.weights->value = bare.gate.weights->value;
        full.lin.weights->value = bare.lin.weights->value;
        const Eigen::MatrixXd x = col({0.4, -1.2});
        const PreparedState state{encoding_circuit(2, cfg), t.constant(x),
                                  t.constant(Eigen::MatrixXd::Zero(0, 1))};
        const Eigen::MatrixXd a = qglu(t, state, bare).value();
        const Eigen::MatrixXd b = qglu(t, t.constant(x), full).value();
        CHECK((a - b).cwiseAbs().maxCoeff() < 1e-14);
    }
    SUBCASE("gradient check") {
        auto &x = ps.add_uniform("x", 2, 1, 2.0, rng);
        const auto r = check_gradients(ps, [&](Tape &tape) {
            const Var y = qglu(tape, tape.leaf(x), p);
            return sum(mul(y, tape.constant(col({1.0, -2.0}))));
        });
        CHECK(r.passed());
    }
}

TEST_CASE("qgrn") {
    Rng rng(13);
    for (const auto &cfg : all_configs()) {
        ParameterStore ps;
        const auto p = make_qgrn(ps, "qgrn", 2, 2, cfg, {}, rng);
        Tape t;
        const Var a = t.constant(col({0.8, -0.3}));
        const Var c = t.constant(col({-1.0, 0.6}));
        const Var y = qgrn(t, a, c, p);
        CHECK(y.rows() == 2);
        CHECK(y.cols() == 1);

        // Rebuild the pre-norm residual and bound it.
        const Var eta1 = elu(add(vqc_apply(t, a, p.vqc_a), vqc_apply(t, c, *p.vqc_c)));
        const Var gated =
            qglu(t, PreparedState{p.eta2_prefix, eta1, t.leaf(*p.eta2_weights)}, p.qglu);
        const Eigen::VectorXd residual = a.value() + gated.value();
        CHECK(residual.cwiseAbs().maxCoeff() <= a.value().cwiseAbs().maxCoeff() + 1.0);
        const Eigen::VectorXd centred = residual.array() - residual.mean();
        const Eigen::VectorXd expected =
            centred / std::sqrt(centred.squaredNorm() / 2.0 + 1e-5);
        CHECK((y.value() - expected).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("qgrn: context handling and gradients") {
    Rng rng(14);
    ParameterStore ps;
    VqcConfig cfg;
    cfg.encoding = Encoding::ZZ;
    cfg.ansatz = Ansatz::NLocal;
    const auto with_proj = make_qgrn(ps, "wide", 3, 2, cfg, {}, rng);
    CHECK(with_proj.context_proj.has_value());
    const auto plain = make_qgrn(ps, "plain", 2, 0, cfg, {}, rng);
    CHECK_FALSE(plain.vqc_c.has_value());

    auto &a2 = ps.add_uniform("a2", 2, 1, 1.0, rng);
    auto &a3 = ps.add_uniform("a3", 3, 1, 1.0, rng);
    auto &c2 = ps.add_uniform("c2", 2, 1, 1.0, rng);
    const auto r = check_gradients(ps, [&](Tape &tape) {
        const Var y3 = qgrn(tape, tape.leaf(a3), tape.leaf(c2), with_proj);
        const Var y2 = qgrn(tape, tape.leaf(a2), std::nullopt, plain);
        return add(sum(mul(y3, tape.constant(col({0.3, -0.8, 1.1})))),
                   sum(mul(y2, tape.constant(col({1.0, 0.25})))));
    });
    CHECK(r.passed());
    CHECK(r.checked == ps.num_scalars());

    Tape t;
    CHECK_THROWS_AS((void)qgrn(t, t.constant(Eigen::MatrixXd::Zero(3, 1)), std::nullopt, plain),
                    ShapeError);
}

TEST_CASE("q_variable_selection") {
    Rng rng(15);
    const VqcConfig cfg;
    auto maker = [&](ParameterStore &ps) {
        return [&ps, &rng, &cfg](const std::string &n, Eigen::Index w, Eigen::Index c) {
            return make_qgrn(ps, n, static_cast<std::size_t>(w), c, cfg, {}, rng);
        };
    };
    Tape t;

    SUBCASE("single variable has unit weight") {
        ParameterStore ps;
        const auto p = nn::make_variable_selection<QgrnParams>(ps, "v", 1, 2, 2, false, rng,
                                                               maker(ps));
        const std::vector<Var> e{t.constant(col({0.5, 2.0}))};
        CHECK(q_variable_selection(t, e, t.constant(col({0.1, 0.2})), p).weights.value()(0) ==
              1.0);
    }
    SUBCASE("weights form a distribution and the output stays in the hull") {
        ParameterStore ps;
        const auto p = nn::make_variable_selection<QgrnParams>(ps, "v", 4, 2, 2, false, rng,
                                                               maker(ps));
        CHECK(p.weight_block->width() == 4);
        CHECK(p.weight_block->context_proj.has_value());
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<Var> e;
            Eigen::MatrixXd processed(4, 2);
            for (std::size_t j = 0; j < 4; ++j) {
                e.push_back(t.constant(col({u(rng), u(rng)})));
                processed.row(static_cast<Eigen::Index>(j)) =
                    qgrn(t, e.back(), std::nullopt, p.per_variable[j]).value().transpose();
            }
            const auto s = q_variable_selection(t, e, t.constant(col({u(rng), u(rng)})), p);
            CHECK((s.weights.value().array() >= 0.0).all());
            CHECK(std::abs(s.weights.value().sum() - 1.0) < 1e-12);
            CHECK(in_hull(s.selected.value(), processed));
        }
    }
}

TEST_CASE("q_static_covariate_encoder") {
    Rng rng(16);
    const VqcConfig cfg;
    ParameterStore ps;
    const auto g = make_qgrn(ps, "g", 2, 0, cfg, {}, rng);
    Tape t;
    const auto same = q_static_covariate_encoder(t, t.constant(col({0.2, -0.7})), {g, g, g, g});
    CHECK(same.selection.value() == same.enrichment.value());
    CHECK(same.selection.value() == same.cell.value());
    CHECK(same.selection.value() == same.hidden.value());
    CHECK(same.hidden.rows() == 2);

    ParameterStore ps2;
    const std::array<QgrnParams, 4> four{make_qgrn(ps2, "s", 2, 0, cfg, {}, rng),
                                         make_qgrn(ps2, "e", 2, 0, cfg, {}, rng),
                                         make_qgrn(ps2, "c", 2, 0, cfg, {}, rng),
                                         make_qgrn(ps2, "h", 2, 0, cfg, {}, rng)};
    auto &xi = ps2.add_uniform("xi", 2, 1, 1.0, rng);
    const auto r = check_gradients(ps2, [&](Tape &tape) {
        const auto c = q_static_covariate_encoder(tape, tape.leaf(xi), four);
        return add(add(sum(c.selection), scale(sum(c.enrichment), -0.5)),
                   add(sum(mul(c.cell, c.cell)), scale(sum(c.hidden), 2.0)));
    });
    CHECK(r.passed());
}

TEST_CASE("q_interpretable_multi_head") {
    Rng rng(17);
    const VqcConfig cfg;
    Tape t;
    const Eigen::MatrixXd s = Eigen::MatrixXd::Random(4, 2) * 2;

    SUBCASE("one head equals single-head attention on the projections") {
        ParameterStore ps;
        const auto p = make_q_attention(ps, "qa", 2, 1, false, cfg, rng);
        const Var sv = t.constant(s);
        const auto proj = q_project(t, sv, p);
        const Eigen::MatrixXd expected =
            nn::attention(t, proj.query[0], proj.key[0], proj.value, 2.0).value();
        const Eigen::MatrixXd got = q_interpretable_multi_head(t, sv, p).value();
        CHECK((got - expected).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("rows lie in the hull of the value rows") {
        ParameterStore ps;
        const auto p = make_q_attention(ps, "qa", 2, 3, false, cfg, rng);
        const Var sv = t.constant(s);
        const Eigen::MatrixXd v = q_project(t, sv, p).value.value();
        const Eigen::MatrixXd out = q_interpretable_multi_head(t, sv, p).value();
        CHECK((out.array().abs() <= 1.0).all());
        for (Eigen::Index i = 0; i < out.rows(); ++i) {
            CHECK(in_hull(out.row(i).transpose(), v));
        }
    }
    SUBCASE("gradient check at two qubits and two positions") {
        ParameterStore ps;
        const auto p = make_q_attention(ps, "qa", 2, 1, false, cfg, rng);
        auto &sl = ps.add_uniform("s", 2, 2, 1.5, rng);
        const auto r = check_gradients(ps, [&](Tape &tape) {
            const Var out = q_interpretable_multi_head(tape, tape.leaf(sl), p);
            return sum(mul(out, tape.constant((Eigen::MatrixXd(2, 2) << 1, -2, 0.5, 3).finished())));
        });
        CHECK(r.passed());
    }
    SUBCASE("row width mismatch") {
        ParameterStore ps;
        const auto p = make_q_attention(ps, "qa", 2, 1, false, cfg, rng);
        CHECK_THROWS_AS((void)q_interpretable_multi_head(t, t.constant(Eigen::MatrixXd::Zero(3, 3)), p),
                        ShapeError);
    }
}

TEST_CASE("qlstm") {
    Rng rng(18);
    const VqcConfig cfg;
    ParameterStore ps;
    const auto p = make_qlstm(ps, "ql", 3, 2, cfg, rng);
    Tape t;

    SUBCASE("zero projection gives constant gates") {
        p.projection.weight->value.setZero();
        p.projection.bias->value.setZero();
        auto gate = [&](const VqcBlockParams &b) -> Eigen::VectorXd {
            return sim::measure_all_z(
                sim::run_circuit(b.circuit, Eigen::VectorXd::Zero(2), b.weights->value));
        };
        const Eigen::VectorXd i = gate(p.input_gate).unaryExpr(&logistic);
        const Eigen::VectorXd f = gate(p.forget_gate).unaryExpr(&logistic);
        const Eigen::VectorXd g = gate(p.cell_gate).array().tanh();
        const Eigen::VectorXd o = gate(p.output_gate).unaryExpr(&logistic);

        Eigen::VectorXd c = col({0.5, -1.0});
        const nn::LstmState s0{t.constant(Eigen::MatrixXd::Zero(2, 1)), t.constant(c)};
        const std::vector<Var> xs{t.constant(col({1.0, 2.0, 3.0})),
                                  t.constant(col({-1.0, 0.0, 4.0})),
                                  t.constant(col({0.2, 0.2, 0.2}))};
        const auto hs = qlstm_seq(t, xs, s0, p);
        for (const auto &h : hs) {
            c = f.cwiseProduct(c) + i.cwiseProduct(g);
            const Eigen::VectorXd expected = o.cwiseProduct(c.array().tanh().matrix());
            CHECK((h.value() - expected).cwiseAbs().maxCoeff() < 1e-14);
        }
    }
    SUBCASE("hidden entries stay inside (-1, 1)") {
        std::uniform_real_distribution<double> u(-10.0, 10.0);
        nn::LstmState s{t.constant(Eigen::MatrixXd::Zero(2, 1)),
                        t.constant(Eigen::MatrixXd::Zero(2, 1))};
        for (int step = 0; step < 10; ++step) {
            s = qlstm_step(t, t.constant(col({u(rng), u(rng), u(rng)})), s, p);
            CHECK((s.h.value().array().abs() < 1.0).all());
        }
    }
    SUBCASE("gradient check over two steps") {
        auto &x0 = ps.add_uniform("x0", 3, 1, 1.0, rng);
        auto &x1 = ps.add_uniform("x1", 3, 1, 1.0, rng);
        auto &h0 = ps.add_uniform("h0", 2, 1, 1.0, rng);
        auto &c0 = ps.add_uniform("c0", 2, 1, 1.0, rng);
        const auto r = check_gradients(ps, [&](Tape &tape) {
            const std::vector<Var> xs{tape.leaf(x0), tape.leaf(x1)};
            nn::LstmState last;
            const auto hs = qlstm_seq(tape, xs, {tape.leaf(h0), tape.leaf(c0)}, p, &last);
            return add(add(sum(hs[0]), scale(sum(hs[1]), -1.5)), sum(mul(last.c, last.c)));
        });
        CHECK(r.passed());
    }
    SUBCASE("width mismatch") {
        const nn::LstmState s0{t.constant(Eigen::MatrixXd::Zero(2, 1)),
                               t.constant(Eigen::MatrixXd::Zero(2, 1))};
        CHECK_THROWS_AS((void)qlstm_step(t, t.constant(Eigen::MatrixXd::Zero(2, 1)), s0, p),
                        ShapeError);
    }
}
