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
#include "qtft/ad/ops.hpp"

#include "qtft/error.hpp"

#include <cmath>
#include <string>

namespace qtft::ad {

namespace {

std::string shape(const Eigen::MatrixXd &m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void same_shape(const Var &a, const Var &b, const char *op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError(std::string(op) + ": " + shape(a.value()) + " vs " +
                         shape(b.value()));
    }
}

void require_column(const Var &a, const char *op) {
    if (a.cols() != 1) {
        throw ShapeError(std::string(op) + " expects a column vector, got " +
                         shape(a.value()));
    }
}

Tape &tape_of(std::span<const Var> parts) {
    if (parts.empty()) {
        throw ShapeError("empty operand list");
    }
    return *parts.front().tape();
}

} // namespace

Var add(const Var &a, const Var &b) {
    same_shape(a, b, "add");
    return a.tape()->record(a.value() + b.value(), {a, b},
                            [a, b](Tape &t, const Eigen::MatrixXd &g) {
                                t.accumulate(a, g);
                                t.accumulate(b, g);
                            });
}

Var sub(const Var &a, const Var &b) {
    same_shape(a, b, "sub");
    return a.tape()->record(a.value() - b.value(), {a, b},
                            [a, b](Tape &t, const Eigen::MatrixXd &g) {
                                t.accumulate(a, g);
                                t.accumulate(b, -g);
                            });
}

Var mul(const Var &a, const Var &b) {
    same_shape(a, b, "mul");
    return a.tape()->record(
        a.value().cwiseProduct(b.value()), {a, b},
        [a, b](Tape &t, const Eigen::MatrixXd &g) {
            if (a.requires_grad()) {
                t.accumulate(a, g.cwiseProduct(b.value()));
            }
            if (b.requires_grad()) {
                t.accumulate(b, g.cwiseProduct(a.value()));
            }
        });
}

Var scale(const Var &a, double s) {
    return a.tape()->record(s * a.value(), {a},
                            [a, s](Tape &t, const Eigen::MatrixXd &g) {
                                t.accumulate(a, s * g);
                            });
}

Var matmul(const Var &a, const Var &b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: " + shape(a.value()) + " * " + shape(b.value()));
    }
    return a.tape()->record(
        a.value() * b.value(), {a, b}, [a, b](Tape &t, const Eigen::MatrixXd &g) {
            if (a.requires_grad()) {
                t.accumulate(a, g * b.value().transpose());
            }
            if (b.requires_grad()) {
                t.accumulate(b, a.value().transpose() * g);
            }
        });
}

Var transpose(const Var &a) {
    return a.tape()->record(a.value().transpose(), {a},
                            [a](Tape &t, const Eigen::MatrixXd &g) {
                                t.accumulate(a, g.transpose());
                            });
}

Var affine(const Var &w, const Var &x, const Var &b) {
    require_column(x, "affine");
    if (w.cols() != x.rows()) {
        throw ShapeError("affine: weight " + shape(w.value()) + " vs input " +
                         shape(x.value()));
    }
    Eigen::MatrixXd out = w.value() * x.value();
    if (!b.valid()) {
        return w.tape()->record(std::move(out), {w, x},
                                [w, x](Tape &t, const Eigen::MatrixXd &g) {
                                    if (w.requires_grad()) {
                                        t.accumulate(w, g * x.value().transpose());
                                    }
                                    if (x.requires_grad()) {
                                        t.accumulate(x, w.value().transpose() * g);
                                    }
                                });
    }
    if (b.rows() != w.rows() || b.cols() != 1) {
        throw ShapeError("affine: bias " + shape(b.value()) + " vs weight " +
                         shape(w.value()));
    }
    out += b.value();
    return w.tape()->record(std::move(out), {w, x, b},
                            [w, x, b](Tape &t, const Eigen::MatrixXd &g) {
                                if (w.requires_grad()) {
                                    t.accumulate(w, g * x.value().transpose());
                                }
                                if (x.requires_grad()) {
                                    t.accumulate(x, w.value().transpose() * g);
                                }
                                t.accumulate(b, g);
                            });
}

Var sigmoid(const Var &a) {
    Eigen::MatrixXd y =
        a.value().unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
    Eigen::MatrixXd dy = y.array() * (1.0 - y.array());
    return a.tape()->record(std::move(y), {a},
                            [a, dy = std::move(dy)](Tape &t, const Eigen::MatrixXd &g) {
                                t.accumulate(a, g.cwiseProduct(dy));
                            });
}

Var tanh(const Var &a) {
    Eigen::MatrixXd y = a.value().array().tanh();
    Eigen::MatrixXd dy = 1.0 - y.array().square();
    return a.tape()->record(std::move(y), {a},
                            [a, dy = std::move(dy)](Tape &t, const Eigen::MatrixXd &g) {
                                t.accumulate(a, g.cwiseProduct(dy));
                            });
}

Var elu(const Var &a) {
    Eigen::MatrixXd y =
        a.value().unaryExpr([](double v) { return v >= 0.0 ? v : std::expm1(v); });
    Eigen::MatrixXd dy =
        a.value().unaryExpr([](double v) { return v >= 0.0 ? 1.0 : std::exp(v); });
    return a.tape()->record(std::move(y), {a},
                            [a, dy = std::move(dy)](Tape &t, const Eigen::MatrixXd &g) {
                                t.accumulate(a, g.cwiseProduct(dy));
                            });
}

namespace {

Eigen::VectorXd softmax_vec(const Eigen::VectorXd &v) {
    const Eigen::VectorXd e = (v.array() - v.maxCoeff()).exp();
    return e / e.sum();
}

} // namespace

Var softmax(const Var &a) {
    require_column(a, "softmax");
    if (a.size() == 0) {
        throw ShapeError("softmax of an empty vector");
    }
    Eigen::MatrixXd y = softmax_vec(a.value().col(0));
    return a.tape()->record(y, {a}, [a, y](Tape &t, const Eigen::MatrixXd &g) {
        // J = diag(y) - y y^T
        const double dot = g.col(0).dot(y.col(0));
        t.accumulate(a, y.cwiseProduct((g.array() - dot).matrix()));
    });
}

Var softmax_rows(const Var &a) {
    Eigen::MatrixXd y(a.rows(), a.cols());
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        y.row(r) = softmax_vec(a.value().row(r).transpose()).transpose();
    }
    return a.tape()->record(y, {a}, [a, y](Tape &t, const Eigen::MatrixXd &g) {
        Eigen::MatrixXd ga(y.rows(), y.cols());
        for (Eigen::Index r = 0; r < y.rows(); ++r) {
            const double dot = g.row(r).dot(y.row(r));
            ga.row(r) = y.row(r).cwiseProduct((g.row(r).array() - dot).matrix());
        }
        t.accumulate(a, ga);
    });
}

Var layer_norm(const Var &a, double eps) {
    require_column(a, "layer_norm");
    const Eigen::VectorXd x = a.value().col(0);
    const auto n = static_cast<double>(x.size());
    const Eigen::VectorXd centered = x.array() - x.mean();
    const double var = centered.squaredNorm() / n;
    const double inv_std = 1.0 / std::sqrt(var + eps);
    Eigen::MatrixXd y = centered * inv_std;
    return a.tape()->record(y, {a}, [a, y, inv_std](Tape &t, const Eigen::MatrixXd &g) {
        const Eigen::VectorXd gv = g.col(0);
        const Eigen::VectorXd yv = y.col(0);
        const Eigen::VectorXd gx =
            inv_std * (gv.array() - gv.mean() - yv.array() * gv.dot(yv) /
                                                   static_cast<double>(yv.size()))
                          .matrix();
        t.accumulate(a, gx);
    });
}

Var concat(std::span<const Var> parts) {
    Tape &tape = tape_of(parts);
    Eigen::Index total = 0;
    for (const auto &p : parts) {
        require_column(p, "concat");
        total += p.rows();
    }
    Eigen::MatrixXd out(total, 1);
    Eigen::Index off = 0;
    for (const auto &p : parts) {
        out.block(off, 0, p.rows(), 1) = p.value();
        off += p.rows();
    }
    std::vector<Var> saved(parts.begin(), parts.end());
    return tape.record(std::move(out), parts,
                       [saved](Tape &t, const Eigen::MatrixXd &g) {
                           Eigen::Index o = 0;
                           for (const auto &p : saved) {
                               if (p.requires_grad()) {
                                   t.accumulate(p, g.block(o, 0, p.rows(), 1));
                               }
                               o += p.rows();
                           }
                       });
}

Var concat(std::initializer_list<Var> parts) {
    return concat(std::span<const Var>(parts.begin(), parts.size()));
}

Var slice(const Var &a, Eigen::Index start, Eigen::Index len) {
    require_column(a, "slice");
    if (start < 0 || len < 0 || start + len > a.rows()) {
        throw ShapeError("slice out of range");
    }
    return a.tape()->record(a.value().block(start, 0, len, 1), {a},
                            [a, start, len](Tape &t, const Eigen::MatrixXd &g) {
                                Eigen::MatrixXd full =
                                    Eigen::MatrixXd::Zero(a.rows(), 1);
                                full.block(start, 0, len, 1) = g;
                                t.accumulate(a, full);
                            });
}

Var row(const Var &m, Eigen::Index i) {
    if (i < 0 || i >= m.rows()) {
        throw ShapeError("row index out of range");
    }
    return m.tape()->record(m.value().row(i).transpose(), {m},
                            [m, i](Tape &t, const Eigen::MatrixXd &g) {
                                Eigen::MatrixXd full =
                                    Eigen::MatrixXd::Zero(m.rows(), m.cols());
                                full.row(i) = g.transpose();
                                t.accumulate(m, full);
                            });
}

Var stack_rows(std::span<const Var> rows) {
    Tape &tape = tape_of(rows);
    const Eigen::Index d = rows.front().rows();
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), d);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        require_column(rows[r], "stack_rows");
        if (rows[r].rows() != d) {
            throw ShapeError("stack_rows: ragged rows");
        }
        out.row(static_cast<Eigen::Index>(r)) = rows[r].value().transpose();
    }
    std::vector<Var> saved(rows.begin(), rows.end());
    return tape.record(std::move(out), rows,
                       [saved](Tape &t, const Eigen::MatrixXd &g) {
                           for (std::size_t r = 0; r < saved.size(); ++r) {
                               if (saved[r].requires_grad()) {
                                   t.accumulate(saved[r],
                                                g.row(static_cast<Eigen::Index>(r))
                                                    .transpose());
                               }
                           }
                       });
}

Var hstack(std::span<const Var> cols) {
    Tape &tape = tape_of(cols);
    const Eigen::Index d = cols.front().rows();
    Eigen::MatrixXd out(d, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
        require_column(cols[c], "hstack");
        if (cols[c].rows() != d) {
            throw ShapeError("hstack: ragged columns");
        }
        out.col(static_cast<Eigen::Index>(c)) = cols[c].value();
    }
    std::vector<Var> saved(cols.begin(), cols.end());
    return tape.record(std::move(out), cols,
                       [saved](Tape &t, const Eigen::MatrixXd &g) {
                           for (std::size_t c = 0; c < saved.size(); ++c) {
                               if (saved[c].requires_grad()) {
                                   t.accumulate(saved[c],
                                                g.col(static_cast<Eigen::Index>(c)));
                               }
                           }
                       });
}

Var sum(const Var &a) {
    return a.tape()->record(Eigen::MatrixXd::Constant(1, 1, a.value().sum()), {a},
                            [a](Tape &t, const Eigen::MatrixXd &g) {
                                t.accumulate(a, Eigen::MatrixXd::Constant(
                                                    a.rows(), a.cols(), g(0, 0)));
                            });
}

Var mean(const Var &a) {
    return scale(sum(a), 1.0 / static_cast<double>(a.size()));
}

Var average(std::span<const Var> parts) {
    Tape &tape = tape_of(parts);
    Eigen::MatrixXd acc = parts.front().value();
    for (std::size_t i = 1; i < parts.size(); ++i) {
        if (parts[i].rows() != acc.rows() || parts[i].cols() != acc.cols()) {
            throw ShapeError("average: shape mismatch");
        }
        acc += parts[i].value();
    }
    const double inv = 1.0 / static_cast<double>(parts.size());
    acc *= inv;
    std::vector<Var> saved(parts.begin(), parts.end());
    return tape.record(std::move(acc), parts,
                       [saved, inv](Tape &t, const Eigen::MatrixXd &g) {
                           for (const auto &p : saved) {
                               t.accumulate(p, inv * g);
                           }
                       });
}

} // namespace qtft::ad
