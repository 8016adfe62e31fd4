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
#include "qtft/ad/tape.hpp"

#include "qtft/error.hpp"

namespace qtft::ad {

const Eigen::MatrixXd &Var::value() const { return tape_->value(id_); }

double Var::scalar() const {
    const auto &v = value();
    if (v.size() != 1) {
        throw ShapeError("scalar() on a " + std::to_string(v.rows()) + "x" +
                         std::to_string(v.cols()) + " node");
    }
    return v(0, 0);
}

bool Var::requires_grad() const { return tape_->requires_grad(id_); }

Var Tape::constant(Eigen::MatrixXd value) {
    nodes_.push_back(Node{std::move(value), {}, {}, nullptr, false});
    return {this, nodes_.size() - 1};
}

Var Tape::leaf(Parameter &param) {
    nodes_.push_back(Node{param.value, {}, {}, &param, true});
    return {this, nodes_.size() - 1};
}

Var Tape::record(Eigen::MatrixXd value, std::initializer_list<Var> parents,
                 Backward backward) {
    return record(std::move(value), std::span<const Var>(parents.begin(), parents.size()),
                  std::move(backward));
}

Var Tape::record(Eigen::MatrixXd value, std::span<const Var> parents,
                 Backward backward) {
    bool needs = false;
    for (const auto &p : parents) {
        needs = needs || nodes_[p.id()].requires_grad;
    }
    nodes_.push_back(Node{std::move(value), {}, needs ? std::move(backward) : Backward{},
                          nullptr, needs});
    return {this, nodes_.size() - 1};
}

void Tape::accumulate(const Var &v, const Eigen::MatrixXd &g) {
    auto &node = nodes_[v.id()];
    if (!node.requires_grad) {
        return;
    }
    if (g.rows() != node.value.rows() || g.cols() != node.value.cols()) {
        throw ShapeError("gradient shape does not match node value");
    }
    if (node.grad.size() == 0) {
        node.grad = g;
    } else {
        node.grad += g;
    }
}

void Tape::backward(const Var &loss, double seed) {
    if (loss.tape() != this) {
        throw ShapeError("loss belongs to another tape");
    }
    if (nodes_[loss.id()].value.size() != 1) {
        throw ShapeError("backward needs a scalar loss");
    }
    for (auto &n : nodes_) {
        n.grad.resize(0, 0);
    }
    accumulate(loss, Eigen::MatrixXd::Constant(1, 1, seed));
    for (std::size_t i = loss.id() + 1; i-- > 0;) {
        auto &node = nodes_[i];
        if (!node.requires_grad || node.grad.size() == 0) {
            continue;
        }
        if (node.param != nullptr) {
            node.param->grad += node.grad;
        } else if (node.backward) {
            // Parents have smaller ids, so node.grad is not written below.
            node.backward(*this, node.grad);
        }
    }
}

Eigen::MatrixXd Tape::grad(const Var &v) const {
    const auto &node = nodes_[v.id()];
    if (node.grad.size() == 0) {
        return Eigen::MatrixXd::Zero(node.value.rows(), node.value.cols());
    }
    return node.grad;
}

} // namespace qtft::ad
