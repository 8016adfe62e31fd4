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
/**
 * @file
 * Reverse-mode tape over dense matrix values.
 *
 * Every node holds an Eigen::MatrixXd value (column vectors are n x 1) and a
 * lazily allocated gradient of the same shape. Nodes are appended in
 * evaluation order, so parents always precede children and a reverse sweep
 * visits the graph in topological order. Nodes that depend on no parameter
 * are never differentiated.
 */
#pragma once

#include "qtft/ad/parameter.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <deque>
#include <functional>
#include <initializer_list>
#include <span>

namespace qtft::ad {

class Tape;

/// Handle to a tape node.
class Var {
  public:
    Var() = default;
    Var(Tape *tape, std::size_t id) : tape_(tape), id_(id) {}

    [[nodiscard]] const Eigen::MatrixXd &value() const;
    [[nodiscard]] Eigen::Index rows() const { return value().rows(); }
    [[nodiscard]] Eigen::Index cols() const { return value().cols(); }
    [[nodiscard]] Eigen::Index size() const { return value().size(); }
    /// Value of a 1x1 node.
    [[nodiscard]] double scalar() const;

    [[nodiscard]] Tape *tape() const noexcept { return tape_; }
    [[nodiscard]] std::size_t id() const noexcept { return id_; }
    [[nodiscard]] bool valid() const noexcept { return tape_ != nullptr; }
    [[nodiscard]] bool requires_grad() const;

  private:
    Tape *tape_ = nullptr;
    std::size_t id_ = 0;
};

class Tape {
  public:
    /// Receives the node's upstream gradient and pushes contributions to its
    /// parents via Tape::accumulate.
    using Backward = std::function<void(Tape &, const Eigen::MatrixXd &)>;

    Tape() = default;
    Tape(const Tape &) = delete;
    Tape &operator=(const Tape &) = delete;

    Var constant(Eigen::MatrixXd value);
    Var leaf(Parameter &param);
    Var record(Eigen::MatrixXd value, std::initializer_list<Var> parents,
               Backward backward);
    Var record(Eigen::MatrixXd value, std::span<const Var> parents,
               Backward backward);

    void accumulate(const Var &v, const Eigen::MatrixXd &g);

    /// Reverse sweep from a 1x1 node seeded with `seed`. Parameter grads are
    /// incremented, so repeated calls accumulate. Throws ShapeError for a
    /// non-scalar loss.
    void backward(const Var &loss, double seed = 1.0);

    [[nodiscard]] const Eigen::MatrixXd &value(std::size_t id) const {
        return nodes_[id].value;
    }
    [[nodiscard]] bool requires_grad(std::size_t id) const {
        return nodes_[id].requires_grad;
    }
    /// Gradient accumulated at a node during the last backward (zero if the
    /// node was not reached).
    [[nodiscard]] Eigen::MatrixXd grad(const Var &v) const;

    [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }

  private:
    struct Node {
        Eigen::MatrixXd value;
        Eigen::MatrixXd grad;
        Backward backward;
        Parameter *param = nullptr;
        bool requires_grad = false;
    };

    std::deque<Node> nodes_;
};

} // namespace qtft::ad
