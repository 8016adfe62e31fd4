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
#include "qtft/ad/parameter.hpp"

#include "qtft/error.hpp"

#include <algorithm>

namespace qtft::ad {

Parameter &ParameterStore::add(std::string name, Eigen::MatrixXd value) {
    if (find(name) != nullptr) {
        throw ConfigError("duplicate parameter name: " + name);
    }
    Parameter p{std::move(name), std::move(value), {}};
    p.zero_grad();
    return params_.emplace_back(std::move(p));
}

Parameter &ParameterStore::add_uniform(std::string name, Eigen::Index rows,
                                       Eigen::Index cols, double bound,
                                       std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> dist(-bound, bound);
    Eigen::MatrixXd value(rows, cols);
    // Column-major fill keeps the draw order independent of Eigen internals.
    for (Eigen::Index c = 0; c < cols; ++c) {
        for (Eigen::Index r = 0; r < rows; ++r) {
            value(r, c) = dist(rng);
        }
    }
    return add(std::move(name), std::move(value));
}

Parameter *ParameterStore::find(std::string_view name) {
    auto it = std::find_if(params_.begin(), params_.end(),
                           [&](const Parameter &p) { return p.name == name; });
    return it == params_.end() ? nullptr : &*it;
}

const Parameter *ParameterStore::find(std::string_view name) const {
    auto it = std::find_if(params_.begin(), params_.end(),
                           [&](const Parameter &p) { return p.name == name; });
    return it == params_.end() ? nullptr : &*it;
}

std::size_t ParameterStore::num_scalars() const noexcept {
    std::size_t n = 0;
    for (const auto &p : params_) {
        n += static_cast<std::size_t>(p.value.size());
    }
    return n;
}

void ParameterStore::zero_grad() {
    for (auto &p : params_) {
        p.zero_grad();
    }
}

void sgd_step(ParameterStore &params, double learning_rate) {
    for (auto &p : params) {
        p.value -= learning_rate * p.grad;
        p.zero_grad();
    }
}

} // namespace qtft::ad
