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
#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <deque>
#include <random>
#include <string>
#include <string_view>

namespace qtft::ad {

/// A trainable leaf: named matrix value plus its gradient accumulator.
struct Parameter {
    std::string name;
    Eigen::MatrixXd value;
    Eigen::MatrixXd grad;

    [[nodiscard]] Eigen::Index size() const noexcept { return value.size(); }
    void zero_grad() { grad.setZero(value.rows(), value.cols()); }
};

/// Owns the parameters of one model. Element addresses are stable, so
/// layers hold plain Parameter pointers.
class ParameterStore {
  public:
    ParameterStore() = default;
    ParameterStore(const ParameterStore &) = delete;
    ParameterStore &operator=(const ParameterStore &) = delete;
    ParameterStore(ParameterStore &&) = default;
    ParameterStore &operator=(ParameterStore &&) = default;

    /// Throws ConfigError on duplicate names.
    Parameter &add(std::string name, Eigen::MatrixXd value);

    /// Uniform(-bound, bound) initialisation.
    Parameter &add_uniform(std::string name, Eigen::Index rows, Eigen::Index cols,
                           double bound, std::mt19937_64 &rng);

    [[nodiscard]] Parameter *find(std::string_view name);
    [[nodiscard]] const Parameter *find(std::string_view name) const;

    [[nodiscard]] std::size_t size() const noexcept { return params_.size(); }
    /// Total number of scalar entries across all parameters.
    [[nodiscard]] std::size_t num_scalars() const noexcept;

    void zero_grad();

    auto begin() { return params_.begin(); }
    auto end() { return params_.end(); }
    [[nodiscard]] auto begin() const { return params_.begin(); }
    [[nodiscard]] auto end() const { return params_.end(); }

  private:
    std::deque<Parameter> params_;
};

/// value <- value - lr * grad for every parameter, then zero all grads.
void sgd_step(ParameterStore &params, double learning_rate);

} // namespace qtft::ad
