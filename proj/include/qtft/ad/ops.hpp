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
 * Differentiable operations on tape variables.
 *
 * Vectors are column matrices. Shape mismatches throw ShapeError.
 */
#pragma once

#include "qtft/ad/tape.hpp"

#include <span>
#include <vector>

namespace qtft::ad {

[[nodiscard]] Var add(const Var &a, const Var &b);
[[nodiscard]] Var sub(const Var &a, const Var &b);
/// Elementwise product.
[[nodiscard]] Var mul(const Var &a, const Var &b);
[[nodiscard]] Var scale(const Var &a, double s);
[[nodiscard]] Var matmul(const Var &a, const Var &b);
[[nodiscard]] Var transpose(const Var &a);

/// W x + b. `b` may be an invalid Var for no bias.
[[nodiscard]] Var affine(const Var &w, const Var &x, const Var &b = {});

[[nodiscard]] Var sigmoid(const Var &a);
[[nodiscard]] Var tanh(const Var &a);
/// ELU with alpha = 1.
[[nodiscard]] Var elu(const Var &a);

/// Softmax of a column vector, max-shifted.
[[nodiscard]] Var softmax(const Var &a);
/// Softmax applied independently to each row.
[[nodiscard]] Var softmax_rows(const Var &a);

/// (x - mean) / sqrt(var + eps) over a column vector, population variance.
[[nodiscard]] Var layer_norm(const Var &a, double eps = 1e-5);

/// Vertical concatenation of column vectors.
[[nodiscard]] Var concat(std::span<const Var> parts);
[[nodiscard]] Var concat(std::initializer_list<Var> parts);
/// Rows [start, start + len) of a column vector.
[[nodiscard]] Var slice(const Var &a, Eigen::Index start, Eigen::Index len);
/// Row i of a matrix, returned as a column vector.
[[nodiscard]] Var row(const Var &m, Eigen::Index i);
/// Column vectors of equal length become the rows of a matrix.
[[nodiscard]] Var stack_rows(std::span<const Var> rows);
/// Column vectors of equal length become the columns of a matrix.
[[nodiscard]] Var hstack(std::span<const Var> cols);

/// Sum of all entries as a 1x1 node.
[[nodiscard]] Var sum(const Var &a);
[[nodiscard]] Var mean(const Var &a);
/// Elementwise mean of equally shaped nodes.
[[nodiscard]] Var average(std::span<const Var> parts);

} // namespace qtft::ad
