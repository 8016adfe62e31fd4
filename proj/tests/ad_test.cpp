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
#include "qtft/ad/ops.hpp"
#include "qtft/ad/quantum.hpp"
#include "qtft/sim/state_vector.hpp"
#include "qtft/sim/templates.hpp"
#include "support/finite_diff.hpp"
#include "support/random_circuit.hpp"

#include <cmath>
#include <numbers>

using namespace qtft;
using namespace qtft::ad;
using std::numbers::pi;

namespace {

Eigen::MatrixXd col(std::initializer_list<double> v) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(v.size()), 1);
    Eigen::Index i = 0;
    for (double x : v) {
        out(i++, 0) = x;
    }
    return out;
}

Eigen::VectorXd expz(const sim::ParameterizedCircuit &c, const Eigen::VectorXd &x,
                     const Eigen::VectorXd &w) {
    return sim::measure_all_z(sim::run_circuit(c, x, w));
}

} // namespace

TEST_CASE("backward: polynomial and sigmoid") {
    ParameterStore ps;
    auto &x = ps.add("x", col({3.0}));
    {
        Tape t;
        const Var v = t.leaf(x);
        t.backward(mul(v, v));
    }
    CHECK(x.grad(0) == 6.0);

    auto &y = ps.add("y", col({0.0}));
    ps.zero_grad();
    {
        Tape t;
        t.backward(sigmoid(t.leaf(y)));
    }
    CHECK(y.grad(0) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("backward: fan-out accumulates and non-scalar losses are rejected") {
    ParameterStore ps;
    auto &x = ps.add("x", col({2.0, -1.0}));
    Tape t;
    const Var v = t.leaf(x);
    const Var loss = sum(add(mul(v, v), scale(v, 3.0)));
    t.backward(loss);
    CHECK(x.grad(0) == doctest::Approx(2 * 2.0 + 3));
    CHECK(x.grad(1) == doctest::Approx(2 * -1.0 + 3));
    CHECK_THROWS_AS(t.backward(v), ShapeError);
}

TEST_CASE("sgd_step") {
    ParameterStore ps;
    auto &p = ps.add("p", col({1.0}));
    p.grad(0) = 0.5;
    sgd_step(ps, 0.1);
    CHECK(p.value(0) == doctest::Approx(0.95).epsilon(1e-15));
    CHECK(p.grad(0) == 0.0);
    sgd_step(ps, 0.1);
    CHECK(p.value(0) == doctest::Approx(0.95).epsilon(1e-15));

    auto &x = ps.add("x", col({1.0}));
    for (int i = 0; i < 2; ++i) {
        Tape t;
        const Var v = t.leaf(x);
        t.backward(mul(v, v));
        sgd_step(ps, 0.1);
    }
    CHECK(x.value(0) == doctest::Approx(0.64).epsilon(1e-14));
}

TEST_CASE("ops: forward values") {
    Tape t;
    const Var s = softmax(t.constant(col({0, 0, 0})));
    CHECK(s.value().isApprox(Eigen::MatrixXd::Constant(3, 1, 1.0 / 3)));
    const Var big = softmax(t.constant(col({1000, 0})));
    CHECK(std::abs(big.value()(0) - 1.0) < 1e-12);
    CHECK(std::abs(big.value()(1)) < 1e-12);
    const Var shifted = softmax(t.constant(col({1.5, -0.2, 0.7})));
    const Var shifted2 = softmax(t.constant(col({101.5, 99.8, 100.7})));
    CHECK((shifted.value() - shifted2.value()).cwiseAbs().maxCoeff() < 1e-12);

    const Var ln = layer_norm(t.constant(col({1, -1})), 0.0);
    CHECK(ln.value().isApprox(col({1, -1})));
    const Var e = elu(t.constant(col({-1, 2})));
    CHECK(e.value()(0) == doctest::Approx(std::exp(-1.0) - 1));
    CHECK(e.value()(1) == 2.0);
    CHECK_THROWS_AS((void)add(t.constant(col({1})), t.constant(col({1, 2}))), ShapeError);
    CHECK_THROWS_AS((void)matmul(t.constant(col({1, 2})), t.constant(col({1, 2}))),
                    ShapeError);
}

TEST_CASE("ops: gradients match finite differences") {
    std::mt19937_64 rng(41);
    ParameterStore ps;
    auto &a = ps.add_uniform("a", 3, 1, 1.5, rng);
    auto &m = ps.add_uniform("m", 3, 3, 1.0, rng);
    auto &b = ps.add_uniform("b", 3, 1, 1.0, rng);
    auto &q = ps.add_uniform("q", 2, 3, 1.0, rng);
    const Eigen::MatrixXd weights = (Eigen::MatrixXd(3, 1) << 0.3, -1.2, 0.8).finished();
    const LossBuilder build = [&](Tape &t) {
        const Var va = t.leaf(a);
        const Var vm = t.leaf(m);
        const Var vb = t.leaf(b);
        const Var vq = t.leaf(q);
        const Var h = elu(affine(vm, va, vb));
        const Var g = mul(sigmoid(h), tanh(sub(h, va)));
        const Var n = layer_norm(add(g, va));
        const Var sm = softmax(n);
        const std::vector<Var> parts{slice(sm, 0, 2), slice(n, 1, 2)};
        const Var cat = concat(parts);
        const Var rows = stack_rows(std::vector<Var>{slice(cat, 0, 3), slice(cat, 1, 3)});
        const Var att = matmul(softmax_rows(matmul(vq, transpose(rows))), rows);
        const Var hs = hstack(std::vector<Var>{row(att, 0), row(att, 1), va});
        const Var avg = average(std::vector<Var>{row(transpose(hs), 0), row(transpose(hs), 2)});
        return add(sum(mul(n, t.constant(weights))), mean(mul(avg, avg)));
    };
    const auto r = check_gradients(ps, build, {1e-6, 1e-7, 1e-6});
    CHECK(r.checked == 3 + 9 + 3 + 6);
    CHECK(r.passed());
    CHECK(r.max_abs_error < 1e-7);
}

TEST_CASE("gradcheck reports injected faults") {
    ParameterStore ps;
    ps.add("x", col({0.7, -0.3}));
    const LossBuilder build = [&](Tape &t) {
        const Var v = t.leaf(*ps.find("x"));
        return sum(mul(v, mul(v, v)));
    };
    CHECK(check_gradients(ps, build).passed());
    GradCheckOptions faulty;
    faulty.oracle_offset = 1e-2;
    const auto r = check_gradients(ps, build, faulty);
    CHECK_FALSE(r.passed());
    CHECK(r.max_abs_error > 1e-3);
    CHECK(ps.find("x")->value(0) == doctest::Approx(0.7).epsilon(1e-15));
}

TEST_CASE("param_shift_partial: RY on one qubit") {
    const auto c = sim::CircuitBuilder(1)
                       .rotation(sim::GateKind::RY, 0, sim::AngleSource::weight(0))
                       .weight_slots(1)
                       .build();
    const Eigen::VectorXd none(0);
    CHECK(std::abs(param_shift_partial(c, none, Eigen::VectorXd::Constant(1, 0.0), 0,
                                       {SlotKind::Weight, 0})) < 1e-15);
    CHECK(param_shift_partial(c, none, Eigen::VectorXd::Constant(1, pi / 2), 0,
                              {SlotKind::Weight, 0}) == doctest::Approx(-1.0).epsilon(1e-14));
    // Unused slot contributes nothing.
    const auto c2 = sim::CircuitBuilder(1)
                        .rotation(sim::GateKind::RY, 0, sim::AngleSource::weight(0))
                        .weight_slots(2)
                        .build();
    CHECK(param_shift_partial(c2, none, Eigen::VectorXd::Constant(2, 0.4), 0,
                              {SlotKind::Weight, 1}) == 0.0);
}

TEST_CASE("param_shift_partial: random circuits vs finite differences") {
    std::mt19937_64 rng(43);
    const double h = 1e-4;
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 1 + trial % 3;
        const auto c = testing_support::random_circuit(rng, n, 14);
        const Eigen::VectorXd x = testing_support::uniform_vector(rng, 3);
        const Eigen::VectorXd w = testing_support::uniform_vector(rng, 4);
        for (std::size_t q = 0; q < n; ++q) {
            for (std::size_t s = 0; s < 4; ++s) {
                const double fd = testing_support::central_difference(
                    [&](double v) {
                        Eigen::VectorXd ww = w;
                        ww(static_cast<Eigen::Index>(s)) = v;
                        return expz(c, x, ww)(static_cast<Eigen::Index>(q));
                    },
                    w(static_cast<Eigen::Index>(s)), h);
                CHECK(std::abs(param_shift_partial(c, x, w, q, {SlotKind::Weight, s}) - fd) <
                      1e-5);
            }
            for (std::size_t s = 0; s < 3; ++s) {
                const double fd = testing_support::central_difference(
                    [&](double v) {
                        Eigen::VectorXd xx = x;
                        xx(static_cast<Eigen::Index>(s)) = v;
                        return expz(c, xx, w)(static_cast<Eigen::Index>(q));
                    },
                    x(static_cast<Eigen::Index>(s)), h);
                CHECK(std::abs(param_shift_partial(c, x, w, q, {SlotKind::Feature, s}) - fd) <
                      1e-5);
            }
        }
    }
}

TEST_CASE("property: shift rule is exact for rotation/phase/CNOT circuits") {
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 1 + trial % 2;
        const auto c = testing_support::random_circuit(rng, n, 10, 3, 4, false);
        const Eigen::VectorXd x = testing_support::uniform_vector(rng, 3);
        const Eigen::VectorXd w = testing_support::uniform_vector(rng, 4);
        for (std::size_t s = 0; s < 4; ++s) {
            const double rich = testing_support::richardson(
                [&](double v) {
                    Eigen::VectorXd ww = w;
                    ww(static_cast<Eigen::Index>(s)) = v;
                    return expz(c, x, ww)(0);
                },
                w(static_cast<Eigen::Index>(s)), 1e-2);
            CHECK(std::abs(param_shift_partial(c, x, w, 0, {SlotKind::Weight, s}) - rich) <
                  1e-8);
        }
    }
}

TEST_CASE("param_shift_jacobian agrees with param_shift_partial") {
    std::mt19937_64 rng(53);
    const auto c = testing_support::random_circuit(rng, 3, 18);
    const Eigen::VectorXd x = testing_support::uniform_vector(rng, 3);
    const Eigen::VectorXd w = testing_support::uniform_vector(rng, 4);
    const auto jac = param_shift_jacobian(c, x, w);
    for (std::size_t q = 0; q < 3; ++q) {
        for (std::size_t s = 0; s < 4; ++s) {
            CHECK(jac.weights(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(s)) ==
                  doctest::Approx(param_shift_partial(c, x, w, q, {SlotKind::Weight, s}))
                      .epsilon(1e-12));
        }
        for (std::size_t s = 0; s < 3; ++s) {
            CHECK(jac.features(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(s)) ==
                  doctest::Approx(param_shift_partial(c, x, w, q, {SlotKind::Feature, s}))
                      .epsilon(1e-12));
        }
    }
}

TEST_CASE("expval_z: zero-layer angle embedding") {
    ParameterStore ps;
    auto &x = ps.add("x", Eigen::MatrixXd::Zero(3, 1));
    const auto c = compose(sim::angle_embedding(3), sim::basic_entangler_layers(3, 0));
    Tape t;
    const Var out = expval_z(c, t.leaf(x), t.constant(Eigen::MatrixXd::Zero(0, 1)));
    CHECK(out.value().isApprox(Eigen::MatrixXd::Ones(3, 1)));
    t.backward(sum(out));
    CHECK(x.grad.cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("expval_z: basic entangler Jacobian vs finite differences") {
    std::mt19937_64 rng(59);
    const auto c = compose(sim::angle_embedding(2), sim::basic_entangler_layers(2, 2));
    const Eigen::VectorXd x0 = testing_support::uniform_vector(rng, 2);
    const Eigen::VectorXd w0 = testing_support::uniform_vector(rng, 4);
    ParameterStore ps;
    auto &x = ps.add("x", x0);
    auto &w = ps.add("w", w0);
    const Eigen::MatrixXd fd_x = testing_support::numeric_jacobian(
        [&](const Eigen::VectorXd &v) { return expz(c, v, w0); }, x0, 1e-5);
    const Eigen::MatrixXd fd_w = testing_support::numeric_jacobian(
        [&](const Eigen::VectorXd &v) { return expz(c, x0, v); }, w0, 1e-5);
    for (Eigen::Index q = 0; q < 2; ++q) {
        ps.zero_grad();
        Tape t;
        const Var out = expval_z(c, t.leaf(x), t.leaf(w));
        t.backward(row(out, q));
        CHECK((x.grad.transpose() - fd_x.row(q)).cwiseAbs().maxCoeff() < 1e-5);
        CHECK((w.grad.transpose() - fd_w.row(q)).cwiseAbs().maxCoeff() < 1e-5);
    }
}

TEST_CASE("expval_z: weights outside the light cone have zero gradient") {
    const auto c = sim::CircuitBuilder(2)
                       .rotation(sim::GateKind::RY, 0, sim::AngleSource::weight(0))
                       .rotation(sim::GateKind::RY, 1, sim::AngleSource::weight(1))
                       .weight_slots(2)
                       .build();
    ParameterStore ps;
    auto &w = ps.add("w", col({0.4, 1.1}));
    Tape t;
    const Var out = expval_z(c, t.constant(Eigen::MatrixXd::Zero(0, 1)), t.leaf(w));
    t.backward(row(out, 0));
    CHECK(w.grad(0) == doctest::Approx(-std::sin(0.4)).epsilon(1e-13));
    CHECK(std::abs(w.grad(1)) < 1e-15);
}

namespace {

struct HybridGraph {
    ParameterStore params;
    sim::ParameterizedCircuit circuit;
    std::size_t width = 2;
};

// dense -> ELU -> layer-norm -> quantum -> sigmoid -> softmax, weighted sum
HybridGraph make_hybrid(std::mt19937_64 &rng, std::size_t width, std::size_t layers,
                        bool zz) {
    HybridGraph g;
    g.width = width;
    g.params.add_uniform("in", static_cast<Eigen::Index>(width), 1, 1.0, rng);
    g.params.add_uniform("w1", static_cast<Eigen::Index>(width),
                         static_cast<Eigen::Index>(width), 1.0, rng);
    g.params.add_uniform("b1", static_cast<Eigen::Index>(width), 1, 1.0, rng);
    const auto enc = zz ? sim::zz_feature_map(width, 1) : sim::angle_embedding(width);
    const auto ans = (width >= 2 && layers % 2 == 1) ? sim::n_local(width, layers)
                                                     : sim::basic_entangler_layers(width, layers);
    g.circuit = compose(enc, ans);
    g.params.add_uniform("theta", static_cast<Eigen::Index>(g.circuit.num_weight_slots()), 1,
                         pi, rng);
    g.params.add_uniform("w2", static_cast<Eigen::Index>(width),
                         static_cast<Eigen::Index>(width), 1.0, rng);
    return g;
}

Var hybrid_loss(HybridGraph &g, Tape &t) {
    auto &p = g.params;
    const Var h = layer_norm(elu(affine(t.leaf(*p.find("w1")), t.leaf(*p.find("in")),
                                        t.leaf(*p.find("b1")))));
    const Var q = expval_z(g.circuit, h, t.leaf(*p.find("theta")));
    const Var s = softmax(affine(t.leaf(*p.find("w2")), sigmoid(q)));
    Eigen::MatrixXd target = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(g.width), 0.2, 1.4);
    return add(sum(mul(s, t.constant(target))), mean(mul(q, q)));
}

} // namespace

TEST_CASE("property: random hybrid graphs pass the gradient check") {
    std::mt19937_64 rng(61);
    std::size_t passed = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t width = 1 + static_cast<std::size_t>(trial) % 4;
        const std::size_t layers = 1 + static_cast<std::size_t>(trial / 4) % 3;
        auto g = make_hybrid(rng, width, layers, trial % 3 == 0);
        const auto r = check_gradients(g.params, [&](Tape &t) { return hybrid_loss(g, t); });
        passed += r.passed() ? 1 : 0;
        CHECK_MESSAGE(r.passed(), "trial ", trial, " worst ", r.worst_parameter, " err ",
                      r.max_abs_error);
    }
    CHECK(passed == 100);
}

TEST_CASE("property: gradients are linear in the loss") {
    std::mt19937_64 rng(67);
    auto g = make_hybrid(rng, 3, 2, true);
    auto grads = [&](int which) {
        g.params.zero_grad();
        Tape t;
        Var l1 = hybrid_loss(g, t);
        Var l2 = sum(mul(t.leaf(*g.params.find("w2")), t.leaf(*g.params.find("w2"))));
        t.backward(which == 0 ? l1 : which == 1 ? l2 : add(l1, l2));
        std::vector<Eigen::MatrixXd> out;
        for (auto &p : g.params) {
            out.push_back(p.grad);
        }
        return out;
    };
    const auto a = grads(0);
    const auto b = grads(1);
    const auto ab = grads(2);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK((a[i] + b[i] - ab[i]).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("property: identical graphs give bit-identical gradients") {
    auto run = [] {
        std::mt19937_64 rng(71);
        auto g = make_hybrid(rng, 3, 3, false);
        Tape t;
        t.backward(hybrid_loss(g, t));
        std::vector<double> flat;
        for (auto &p : g.params) {
            flat.insert(flat.end(), p.grad.data(), p.grad.data() + p.grad.size());
        }
        return flat;
    };
    CHECK(run() == run());
}
