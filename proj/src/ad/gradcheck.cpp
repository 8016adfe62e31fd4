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
#include "qtft/ad/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace qtft::ad {

namespace {

double evaluate(const LossBuilder &build) {
    Tape tape;
    return build(tape).scalar();
}

} // namespace

GradCheckResult check_gradients(ParameterStore &params, const LossBuilder &build,
                                const GradCheckOptions &options) {
    params.zero_grad();
    {
        Tape tape;
        const Var loss = build(tape);
        tape.backward(loss);
    }
    std::vector<Eigen::MatrixXd> analytic;
    analytic.reserve(params.size());
    for (auto &p : params) {
        analytic.push_back(p.grad);
        p.value.array() += options.oracle_offset;
    }

    GradCheckResult result;
    std::size_t k = 0;
    for (auto &p : params) {
        for (Eigen::Index i = 0; i < p.value.size(); ++i) {
            const double base = p.value(i);
            p.value(i) = base + options.step;
            const double up = evaluate(build);
            p.value(i) = base - options.step;
            const double down = evaluate(build);
            p.value(i) = base;

            const double numeric = (up - down) / (2 * options.step);
            const double err = std::abs(analytic[k](i) - numeric);
            const double rel = err / std::max(std::abs(numeric), 1e-12);
            ++result.checked;
            if (err > std::max(options.abs_tol, options.rel_tol * std::abs(numeric))) {
                ++result.failures;
            }
            if (err > result.max_abs_error) {
                result.max_abs_error = err;
                result.max_rel_error = rel;
                result.worst_parameter = p.name;
                result.worst_index = i;
            }
        }
        ++k;
    }
    for (auto &p : params) {
        p.value.array() -= options.oracle_offset;
        p.zero_grad();
    }
    return result;
}

} // namespace qtft::ad
