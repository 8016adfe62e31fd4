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
#include "qtft/forecast/forecasting.hpp"

#include <cmath>
#include <set>

using namespace qtft;
using namespace qtft::model;

namespace {

ModelInputs window(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(23.0, 32.0);
    ModelInputs in{Eigen::VectorXd::Ones(1), Eigen::MatrixXd(2, 4), Eigen::MatrixXd(2, 1)};
    for (Eigen::Index i = 0; i < in.past.size(); ++i) {
        in.past.data()[i] = u(rng);
    }
    in.future << 0.5, 0.54;
    return in;
}

const ModelKind kAll[] = {ModelKind::Tft, ModelKind::Qtft, ModelKind::QtftQlstm};

} // namespace

TEST_CASE("model kind names round-trip") {
    for (auto k : kAll) {
        CHECK(parse_model_kind(to_string(k)) == k);
    }
    CHECK(parse_model_kind("QTFT") == ModelKind::Qtft);
    CHECK_THROWS_AS((void)parse_model_kind("lstm"), ConfigError);
}

TEST_CASE("forward: output shape is quantiles x horizon") {
    for (auto k : kAll) {
        ModelConfig cfg;
        cfg.kind = k;
        cfg.quantiles = {0.1, 0.5, 0.9};
        cfg.forecast_steps = 3;
        ModelInputs in = window(1);
        in.future = Eigen::MatrixXd::Constant(3, 1, 0.6);
        const auto m = make_model(cfg, 3);
        const Eigen::MatrixXd y = m->predict(in);
        CHECK(y.rows() == 3);
        CHECK(y.cols() == 3);
        CHECK(y.allFinite());
    }
}

TEST_CASE("forward: identical past variables can be swapped") {
    for (auto k : kAll) {
        ModelConfig cfg;
        cfg.kind = k;
        const auto m = make_model(cfg, 5);
        ModelInputs in = window(2);
        in.past.col(2) = in.past.col(1);
        ModelInputs swapped = in;
        swapped.past.col(1).swap(swapped.past.col(2));
        CHECK(m->predict(in) == m->predict(swapped));
    }
}

TEST_CASE("forward: zero ansatz weights are deterministic and finite") {
    for (auto k : {ModelKind::Qtft, ModelKind::QtftQlstm}) {
        ModelConfig cfg;
        cfg.kind = k;
        const auto m = make_model(cfg, 9);
        for (auto &p : m->params()) {
            if (p.name.ends_with(".theta")) {
                p.value.setZero();
            }
        }
        const ModelInputs in = window(3);
        const Eigen::MatrixXd a = m->predict(in);
        CHECK(a.allFinite());
        CHECK(a == m->predict(in));
    }
}

TEST_CASE("forward: shape and configuration errors") {
    ModelConfig cfg;
    const auto m = make_model(cfg, 1);
    ModelInputs in = window(4);
    in.past = Eigen::MatrixXd::Zero(3, 4);
    CHECK_THROWS_AS((void)m->predict(in), ShapeError);
    in = window(4);
    in.future = Eigen::MatrixXd::Zero(2, 2);
    CHECK_THROWS_AS((void)m->predict(in), ShapeError);

    ModelConfig bad;
    bad.quantiles = {1.0};
    CHECK_THROWS_AS((void)make_model(bad, 1), ConfigError);
    bad = {};
    bad.d_model = 0;
    CHECK_THROWS_AS((void)make_model(bad, 1), ConfigError);
    bad = {};
    bad.heads = 0;
    CHECK_THROWS_AS((void)make_model(bad, 1), ConfigError);
}

TEST_CASE("parameters: counts are the sum over named leaves, all reachable") {
    for (auto k : kAll) {
        ModelConfig cfg;
        cfg.kind = k;
        const auto m = make_model(cfg, 11);
        std::size_t total = 0;
        std::set<std::string> names;
        for (const auto &p : m->params()) {
            total += static_cast<std::size_t>(p.value.size());
            names.insert(p.name);
        }
        CHECK(total == m->num_trainable());
        CHECK(names.size() == m->params().size());

        const ModelInputs in = window(5);
        ad::Tape t;
        const ad::Var y = m->forward(t, in);
        t.backward(forecast::quantile_loss(t, y, Eigen::Vector2d(26.0, 27.0), {0.5}));
        for (const auto &p : m->params()) {
            INFO(p.name);
            CHECK(p.grad.size() == p.value.size());
            CHECK(p.grad.allFinite());
        }
    }
}

TEST_CASE("parameters: same seed, same model") {
    for (auto k : kAll) {
        ModelConfig cfg;
        cfg.kind = k;
        const auto a = make_model(cfg, 21);
        const auto b = make_model(cfg, 21);
        const auto c = make_model(cfg, 22);
        auto ia = a->params().begin();
        auto ic = c->params().begin();
        bool differs = false;
        for (const auto &p : b->params()) {
            CHECK(p.value == ia->value);
            differs = differs || p.value != ic->value;
            ++ia;
            ++ic;
        }
        CHECK(differs);
    }
}

TEST_CASE("parameters: shared selection blocks shrink the model") {
    ModelConfig cfg;
    const auto separate = make_model(cfg, 1);
    cfg.share_selection_blocks = true;
    const auto shared = make_model(cfg, 1);
    CHECK(shared->num_trainable() < separate->num_trainable());
}

TEST_CASE("end-to-end gradients under non-default settings") {
    for (auto k : kAll) {
        ModelConfig cfg;
        cfg.kind = k;
        cfg.quantiles = {0.2, 0.8};
        cfg.heads = 2;
        cfg.causal_attention = true;
        cfg.norm.affine = true;
        cfg.vqc.encoding = qnn::Encoding::ZZ;
        cfg.vqc.ansatz = qnn::Ansatz::NLocal;
        cfg.vqc.layers = 1;
        const auto m = make_model(cfg, 31);
        ModelInputs in = window(6);
        in.past /= 30.0;
        const Eigen::Vector2d y(1.5, -0.5);
        const auto r = ad::check_gradients(m->params(), [&](ad::Tape &t) {
            return forecast::quantile_loss(t, m->forward(t, in), y, cfg.quantiles);
        });
        INFO(to_string(k), " worst ", r.worst_parameter, " ", r.max_abs_error);
        CHECK(r.passed());
    }
}
