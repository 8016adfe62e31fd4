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
 * Sliding windows, the pinball loss and the full-batch training loop.
 */
#pragma once

#include "qtft/model/fusion.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace qtft::forecast {

/// Mean pinball loss (1/m) sum max((q - 1) e_i, q e_i) with e = y - yhat.
/// Throws ShapeError on a length mismatch or empty input and ConfigError for
/// q outside (0, 1).
[[nodiscard]] double quantile_loss(const Eigen::Ref<const Eigen::VectorXd> &y,
                                   const Eigen::Ref<const Eigen::VectorXd> &yhat, double q);

/// Tape version over a (num_quantiles x tau) forecast: row r is scored with
/// quantiles[r] against `targets` (length tau) and the result is the mean
/// over all entries. The subgradient at e = 0 is taken as 0.
[[nodiscard]] ad::Var quantile_loss(ad::Tape &tape, const ad::Var &forecast,
                                    const Eigen::VectorXd &targets,
                                    const std::vector<double> &quantiles);

/// Inclusive row interval [first, last].
struct IndexRange {
    std::size_t first = 0;
    std::size_t last = 0;

    [[nodiscard]] std::size_t size() const noexcept { return last - first + 1; }
    [[nodiscard]] bool overlaps(const IndexRange &o) const noexcept {
        return first <= o.last && o.first <= last;
    }
    bool operator==(const IndexRange &) const = default;
};

struct WindowedSample {
    std::size_t anchor = 0;        // last observed row
    Eigen::MatrixXd past;          // k x m_past
    Eigen::MatrixXd future_known;  // tau x m_future
    Eigen::VectorXd static_vars;   // m_s
    Eigen::VectorXd targets;       // tau

    [[nodiscard]] model::ModelInputs inputs() const {
        return {static_vars, past, future_known};
    }
};

/// One sample per anchor t in [first + k - 1, last - tau], stride 1. Past
/// rows are [t - k + 1, t] over every column except `target_col`; targets
/// are the target column at rows [t + 1, t + tau]. The known future input is
/// the row index scaled by 1 / (T - 1) and the static input is the constant
/// 1.0. Throws DataError when the range leaves the series or yields no
/// window.
[[nodiscard]] std::vector<WindowedSample> make_windows(const Eigen::MatrixXd &series,
                                                       Eigen::Index target_col, std::size_t k,
                                                       std::size_t tau, IndexRange range);

/// Per-column affine map onto [0, 1] fitted on a row range.
struct MinMaxScaler {
    Eigen::RowVectorXd lo;
    Eigen::RowVectorXd hi;

    [[nodiscard]] static MinMaxScaler fit(const Eigen::MatrixXd &series, IndexRange rows);
    [[nodiscard]] Eigen::MatrixXd transform(const Eigen::MatrixXd &series) const;
};

struct TrainConfig {
    double quantile = 0.5;
    double learning_rate = 0.1;
    std::size_t epochs = 100;
    std::size_t past_steps = 2;
    std::size_t forecast_steps = 2;
    IndexRange train_range{0, 19};
    IndexRange test_range{20, 26};
    std::uint64_t seed = 7;
    model::ModelKind model_kind = model::ModelKind::Tft;
    Eigen::Index d_model = 2;
    std::size_t ansatz_layers = 2;
    std::size_t heads = 1;
    bool min_max_scaling = false;

    /// Throws ConfigError on any invalid field.
    void validate() const;

    /// Model configuration for a series with `num_past_vars` observed inputs.
    [[nodiscard]] model::ModelConfig model_config(std::size_t num_past_vars) const;
};

struct TrainResult {
    std::vector<double> loss_history; // mean loss, epochs + 1 entries
    std::vector<double> sum_history;  // same losses summed over every point
};

/// Called with (epoch, mean loss) as each history entry is recorded.
using EpochCallback = std::function<void(std::size_t, double)>;

/// Full-batch gradient descent. Entry e of the history is the loss before
/// update e; the last entry is the loss after the final update. Throws
/// TrainingDivergedError on a non-finite loss.
TrainResult train(model::ForecastModel &model, const std::vector<WindowedSample> &samples,
                  const TrainConfig &cfg, const EpochCallback &on_epoch = {});

/// Mean quantile loss over all samples and horizons, without updates.
[[nodiscard]] double evaluate(const model::ForecastModel &model,
                              const std::vector<WindowedSample> &samples);

/// Forecast of the first quantile for each sample (rows) and horizon (cols).
[[nodiscard]] Eigen::MatrixXd predict(const model::ForecastModel &model,
                                      const std::vector<WindowedSample> &samples);

} // namespace qtft::forecast
