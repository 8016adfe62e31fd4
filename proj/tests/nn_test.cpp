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
#include "qtft/nn/variable_selection.hpp"

#include <cmath>

using namespace qtft;
using namespace qtft::ad;
using namespace qtft::nn;

namespace {

Eigen::MatrixXd col(std::initializer_list<double> v) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(v.size()), 1);
    Eigen::Index i = 0;
    for (double x : v) {
        out(i++, 0) = x;
    }
    return out;
}

void zero_all(ParameterStore &ps) {
    for (auto &p : ps) {
        p.value.setZero();
    }
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Coordinatewise hull check: every entry of `x` lies between the min and max
// of the corresponding entries of `points`.
bool in_hull(const Eigen::VectorXd &x, const std::vector<Eigen::VectorXd> &points,
             double tol = 1e-12) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        double lo = points.front()(i);
        double hi = lo;
        for (const auto &p : points) {
            lo = std::min(lo, p(i));
            hi = std::max(hi, p(i));
        }
        if (x(i) < lo - tol || x(i) > hi + tol) {
            return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("glu") {
    Rng rng(1);
    ParameterStore ps;
    const auto p = make_glu(ps, "glu", 2, 2, rng);
    Tape t;
    const Var x = t.constant(col({2.0, -2.0}));

    SUBCASE("zero weights give zero") {
        zero_all(ps);
        CHECK(glu(t, x, p).value().isZero(0.0));
    }
    SUBCASE("half-open gate on the identity") {
        zero_all(ps);
        p.lin.weight->value.setIdentity();
        const Eigen::MatrixXd y = glu(t, x, p).value();
        CHECK(y(0) == 1.0);
        CHECK(y(1) == -1.0);
    }
    SUBCASE("saturated gate passes the linear branch") {
        p.gate.bias->value.setConstant(20.0);
        p.gate.weight->value.setZero();
        const Eigen::MatrixXd lin = dense(t, p.lin, x).value();
        const Eigen::MatrixXd y = glu(t, x, p).value();
        CHECK((y - lin).norm() < 1e-8 * lin.norm());
    }
}

TEST_CASE("grn") {
    Rng rng(2);
    ParameterStore ps;
    const auto p = make_grn(ps, "grn", 2, 3, {}, rng);
    Tape t;
    const Var a = t.constant(col({1.0, -1.0}));

    SUBCASE("zero weights reduce to the normalised input") {
        zero_all(ps);
        const Eigen::MatrixXd y = grn(t, a, std::nullopt, p).value();
        CHECK(y(0) == doctest::Approx(1.0).epsilon(1e-5));
        CHECK(y(1) == doctest::Approx(-1.0).epsilon(1e-5));
    }
    SUBCASE("omitted context equals a zero context weight") {
        p.context->weight->value.setZero();
        const Var c = t.constant(col({0.4, -2.0, 1.0}));
        CHECK(grn(t, a, std::nullopt, p).value() == grn(t, a, c, p).value());
    }
    SUBCASE("gradient check") {
        auto &a_leaf = ps.add_uniform("a", 2, 1, 1.5, rng);
        auto &c_leaf = ps.add_uniform("c", 3, 1, 1.5, rng);
        const Eigen::MatrixXd w = col({0.7, -1.3});
        const auto r = check_gradients(ps, [&](Tape &tape) {
            return sum(mul(grn(tape, tape.leaf(a_leaf), tape.leaf(c_leaf), p), tape.constant(w)));
        });
        CHECK(r.passed());
        CHECK(r.max_abs_error < 1e-5);
    }
}

TEST_CASE("grn rejects mismatched widths") {
    Rng rng(3);
    ParameterStore ps;
    const auto p = make_grn(ps, "grn", 2, 0, {}, rng);
    Tape t;
    CHECK_THROWS_AS((void)grn(t, t.constant(col({1.0, 2.0, 3.0})), std::nullopt, p), ShapeError);
}

TEST_CASE("softmax examples") {
    Tape t;
    const Eigen::MatrixXd u = softmax(t.constant(col({0.0, 0.0, 0.0}))).value();
    for (Eigen::Index i = 0; i < 3; ++i) {
        CHECK(u(i) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    }
    const Eigen::MatrixXd big = softmax(t.constant(col({1000.0, 0.0}))).value();
    CHECK(std::abs(big(0) - 1.0) < 1e-12);
    CHECK(std::abs(big(1)) < 1e-12);
    const Eigen::MatrixXd w = col({0.3, -1.1, 2.0});
    const Eigen::MatrixXd shifted = softmax(t.constant((w.array() + 7.5).matrix())).value();
    CHECK((shifted - softmax(t.constant(w)).value()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("variable_selection") {
    Rng rng(4);
    ParameterStore ps;
    Tape t;

    SUBCASE("single variable has unit weight") {
        const auto p = make_variable_selection<GrnParams>(
            ps, "vsn", 1, 2, 2, false, rng,
            [&](const std::string &n, Eigen::Index w, Eigen::Index c) {
                return make_grn(ps, n, w, c, {}, rng);
            });
        const std::vector<Var> e{t.constant(col({0.5, 2.0}))};
        const auto s = variable_selection(t, e, t.constant(col({1.0, 1.0})), p);
        CHECK(s.weights.value()(0) == 1.0);
    }
    SUBCASE("identical embeddings with a shared block") {
        const auto p = make_variable_selection<GrnParams>(
            ps, "vsn", 3, 2, 2, true, rng,
            [&](const std::string &n, Eigen::Index w, Eigen::Index c) {
                return make_grn(ps, n, w, c, {}, rng);
            });
        const Var e0 = t.constant(col({0.5, -0.25}));
        const std::vector<Var> e{e0, e0, e0};
        const auto s = variable_selection(t, e, t.constant(col({0.1, 0.2})), p);
        const Eigen::MatrixXd processed = grn(t, e0, std::nullopt, p.per_variable.front()).value();
        CHECK((s.selected.value() - processed).cwiseAbs().maxCoeff() < 1e-14);
    }
    SUBCASE("random instances stay in the hull") {
        const auto p = make_variable_selection<GrnParams>(
            ps, "vsn", 4, 3, 3, false, rng,
            [&](const std::string &n, Eigen::Index w, Eigen::Index c) {
                return make_grn(ps, n, w, c, {}, rng);
            });
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<Var> e;
            std::vector<Eigen::VectorXd> processed;
            for (std::size_t j = 0; j < 4; ++j) {
                const Var ej = t.constant(col({u(rng), u(rng), u(rng)}));
                e.push_back(ej);
                processed.emplace_back(grn(t, ej, std::nullopt, p.per_variable[j]).value());
            }
            const auto s = variable_selection(t, e, t.constant(col({u(rng), u(rng), u(rng)})), p);
            const Eigen::VectorXd wts = s.weights.value();
            CHECK((wts.array() >= 0.0).all());
            CHECK(std::abs(wts.sum() - 1.0) < 1e-12);
            CHECK(in_hull(s.selected.value(), processed));
        }
    }
    SUBCASE("wrong variable count") {
        const auto p = make_variable_selection<GrnParams>(
            ps, "vsn", 2, 2, 0, false, rng,
            [&](const std::string &n, Eigen::Index w, Eigen::Index c) {
                return make_grn(ps, n, w, c, {}, rng);
            });
        const std::vector<Var> e{t.constant(col({0.5, 2.0}))};
        CHECK_THROWS_AS((void)variable_selection(t, e, std::nullopt, p), ShapeError);
    }
}

TEST_CASE("static_covariate_encoder") {
    Rng rng(5);
    ParameterStore ps;
    const auto g = make_grn(ps, "g", 2, 0, {}, rng);
    const std::array<GrnParams, 4> same{g, g, g, g};
    Tape t;
    const Var xi = t.constant(col({0.3, 1.7}));
    const auto c = static_covariate_encoder(t, xi, same);
    CHECK(c.selection.value() == c.enrichment.value());
    CHECK(c.selection.value() == c.cell.value());
    CHECK(c.selection.value() == c.hidden.value());

    zero_all(ps);
    const auto z = static_covariate_encoder(t, xi, same);
    CHECK(z.hidden.value()(0) == doctest::Approx(-1.0).epsilon(1e-5));
    CHECK(z.hidden.value()(1) == doctest::Approx(1.0).epsilon(1e-5));

    ParameterStore ps2;
    const std::array<GrnParams, 4> four{make_grn(ps2, "s", 2, 0, {}, rng),
                                        make_grn(ps2, "e", 2, 0, {}, rng),
                                        make_grn(ps2, "c", 2, 0, {}, rng),
                                        make_grn(ps2, "h", 2, 0, {}, rng)};
    auto &leaf = ps2.add_uniform("xi", 2, 1, 1.0, rng);
    const auto r = check_gradients(ps2, [&](Tape &tape) {
        const auto out = static_covariate_encoder(tape, tape.leaf(leaf), four);
        const Eigen::MatrixXd w = col({0.4, -0.9});
        return sum(mul(add(add(out.selection, scale(out.enrichment, 0.5)),
                           add(scale(out.cell, -0.7), scale(out.hidden, 1.3))),
                       tape.constant(w)));
    });
    CHECK(r.passed());
}

TEST_CASE("lstm") {
    Rng rng(6);
    ParameterStore ps;
    const auto p = make_lstm(ps, "lstm", 2, 3, rng);
    Tape t;

    SUBCASE("zero weights and zero state stay at zero") {
        zero_all(ps);
        const LstmState s0{t.constant(Eigen::MatrixXd::Zero(3, 1)),
                           t.constant(Eigen::MatrixXd::Zero(3, 1))};
        const std::vector<Var> xs{t.constant(col({1.0, 2.0})), t.constant(col({-1.0, 0.5}))};
        for (const auto &h : lstm_seq(t, xs, s0, p)) {
            CHECK(h.value().isZero(0.0));
        }
    }
    SUBCASE("one step with zero input matches hand evaluation") {
        const Eigen::VectorXd h0 = col({0.2, -0.4, 0.9});
        const Eigen::VectorXd c0 = col({1.0, 0.0, -0.5});
        Eigen::VectorXd xh(5);
        xh << 0.0, 0.0, h0;
        auto gate = [&](const DenseParams &d) -> Eigen::VectorXd {
            return d.weight->value * xh + d.bias->value;
        };
        const Eigen::VectorXd i = gate(p.input_gate).unaryExpr(&logistic);
        const Eigen::VectorXd f = gate(p.forget_gate).unaryExpr(&logistic);
        const Eigen::VectorXd g = gate(p.cell_gate).array().tanh();
        const Eigen::VectorXd o = gate(p.output_gate).unaryExpr(&logistic);
        const Eigen::VectorXd c1 = f.cwiseProduct(c0) + i.cwiseProduct(g);
        const Eigen::VectorXd h1 = o.cwiseProduct(c1.array().tanh().matrix());

        const auto s = lstm_step(t, t.constant(Eigen::MatrixXd::Zero(2, 1)),
                                 {t.constant(h0), t.constant(c0)}, p);
        CHECK((s.h.value() - h1).cwiseAbs().maxCoeff() < 1e-15);
        CHECK((s.c.value() - c1).cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("gradient check through three steps") {
        auto &xs = ps.add_uniform("xs", 2, 3, 1.0, rng);
        auto &h0 = ps.add_uniform("h0", 3, 1, 1.0, rng);
        auto &c0 = ps.add_uniform("c0", 3, 1, 1.0, rng);
        const auto r = check_gradients(ps, [&](Tape &tape) {
            const Var x = tape.leaf(xs);
            const Var xt = transpose(x);
            const std::vector<Var> in{row(xt, 0), row(xt, 1), row(xt, 2)};
            const auto hs = lstm_seq(tape, in, {tape.leaf(h0), tape.leaf(c0)}, p);
            return add(sum(hs[0]), add(scale(sum(hs[1]), -0.5), sum(mul(hs[2], hs[2]))));
        });
        CHECK(r.passed());
    }
    SUBCASE("empty sequence") {
        const LstmState s0{t.constant(Eigen::MatrixXd::Zero(3, 1)),
                           t.constant(Eigen::MatrixXd::Zero(3, 1))};
        CHECK_THROWS_AS((void)lstm_seq(t, {}, s0, p), ShapeError);
    }
}

TEST_CASE("attention") {
    Rng rng(7);
    Tape t;
    const Eigen::MatrixXd v = Eigen::MatrixXd::Random(4, 3);

    SUBCASE("zero scores average the values") {
        const Var z = t.constant(Eigen::MatrixXd::Zero(4, 2));
        const Eigen::MatrixXd out = attention(t, z, z, t.constant(v), 2.0).value();
        const Eigen::RowVectorXd mean = v.colwise().mean();
        for (Eigen::Index i = 0; i < 4; ++i) {
            CHECK((out.row(i) - mean).cwiseAbs().maxCoeff() < 1e-15);
        }
    }
    SUBCASE("a single position returns V") {
        const Eigen::MatrixXd v1 = v.topRows(1);
        const Eigen::MatrixXd out =
            attention(t, t.constant(Eigen::MatrixXd::Random(1, 2)),
                      t.constant(Eigen::MatrixXd::Random(1, 2)), t.constant(v1), 2.0)
                .value();
        CHECK((out - v1).cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("rows are convex combinations of V") {
        std::vector<Eigen::VectorXd> rows;
        for (Eigen::Index i = 0; i < 4; ++i) {
            rows.emplace_back(v.row(i).transpose());
        }
        for (int trial = 0; trial < 20; ++trial) {
            const Eigen::MatrixXd out =
                attention(t, t.constant(Eigen::MatrixXd::Random(5, 2) * 3),
                          t.constant(Eigen::MatrixXd::Random(4, 2) * 3), t.constant(v), 2.0)
                    .value();
            for (Eigen::Index i = 0; i < out.rows(); ++i) {
                CHECK(in_hull(out.row(i).transpose(), rows));
            }
        }
    }
    SUBCASE("causal mask blocks later positions") {
        const Eigen::MatrixXd out =
            attention(t, t.constant(Eigen::MatrixXd::Random(4, 2)),
                      t.constant(Eigen::MatrixXd::Random(4, 2)), t.constant(v), 2.0, true)
                .value();
        CHECK((out.row(0) - v.row(0)).cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("shape mismatch") {
        CHECK_THROWS_AS((void)attention(t, t.constant(Eigen::MatrixXd::Zero(4, 2)),
                                        t.constant(Eigen::MatrixXd::Zero(4, 3)), t.constant(v),
                                        2.0),
                        ShapeError);
    }
}

TEST_CASE("interpretable_multi_head") {
    Rng rng(8);
    Tape t;
    const Eigen::MatrixXd s = Eigen::MatrixXd::Random(5, 4);

    SUBCASE("one head equals single-head attention times the combiner") {
        ParameterStore ps;
        const auto p = make_attention(ps, "mha", 4, 1, false, rng);
        const Var sv = t.constant(s);
        const Var q = matmul(sv, t.leaf(*p.query[0]));
        const Var k = matmul(sv, t.leaf(*p.key[0]));
        const Var v = matmul(sv, t.leaf(*p.value));
        const Eigen::MatrixXd expected =
            matmul(attention(t, q, k, v, static_cast<double>(p.d_attn)), t.leaf(*p.combine))
                .value();
        const Eigen::MatrixXd got = interpretable_multi_head(t, sv, p).value();
        CHECK((got - expected).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("identical heads equal any one head") {
        ParameterStore ps;
        auto p = make_attention(ps, "mha", 4, 3, false, rng);
        for (std::size_t h = 1; h < 3; ++h) {
            p.query[h]->value = p.query[0]->value;
            p.key[h]->value = p.key[0]->value;
        }
        AttentionParams one = p;
        one.query.resize(1);
        one.key.resize(1);
        const Var sv = t.constant(s);
        const Eigen::MatrixXd all = interpretable_multi_head(t, sv, p).value();
        const Eigen::MatrixXd single = interpretable_multi_head(t, sv, one).value();
        CHECK((all - single).cwiseAbs().maxCoeff() < 1e-14);
    }
    SUBCASE("head width") {
        CHECK(attention_width(2, 1) == 2);
        CHECK(attention_width(5, 2) == 3);
        CHECK(attention_width(1, 4) == 1);
    }
    SUBCASE("gradient check") {
        ParameterStore ps;
        const auto p = make_attention(ps, "mha", 3, 2, false, rng);
        auto &sl = ps.add_uniform("s", 4, 3, 1.0, rng);
        const Eigen::MatrixXd w = Eigen::MatrixXd::Random(4, 3);
        const auto r = check_gradients(ps, [&](Tape &tape) {
            return sum(mul(interpretable_multi_head(tape, tape.leaf(sl), p), tape.constant(w)));
        });
        CHECK(r.passed());
    }
}
