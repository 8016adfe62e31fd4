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
#include "qtft/forecast/forecasting.hpp"

#include "qtft/ad/ops.hpp"

#include <cmath>
#include <string>

namespace qtft::forecast {

namespace {

void check_quantile(double q) {
    if (!(q > 0.0 && q < 1.0)) {
        throw ConfigError("quantile must lie in (0, 1), got " + std::to_string(q));
    }
}

double pinball(double e, double q) { return std::max((q - 1.0) * e, q * e); }

} // namespace

double quantile_loss(const Eigen::Ref<const Eigen::VectorXd> &y,
                     const Eigen::Ref<const Eigen::VectorXd> &yhat, double q) {
    check_quantile(q);
    if (y.size() != yhat.size() || y.size() == 0) {
        throw ShapeError("quantile_loss: lengths " + std::to_string(y.size()) + " and " +
                         std::to_string(yhat.size()));
    }
    double total = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        total += pinball(y(i) - yhat(i), q);
    }
    return total / static_cast<double>(y.size());
}

ad::Var quantile_loss(ad::Tape &tape, const ad::Var &forecast, const Eigen::VectorXd &targets,
                      const std::vector<double> &quantiles) {
    const Eigen::MatrixXd &f = forecast.value();
    if (f.rows() != static_cast<Eigen::Index>(quantiles.size()) || f.cols() != targets.size() ||
        f.size() == 0) {
        throw ShapeError("quantile_loss: forecast is " + std::to_string(f.rows()) + "x" +
                         std::to_string(f.cols()) + " for " + std::to_string(quantiles.size()) +
                         " quantiles and " + std::to_string(targets.size()) + " targets");
    }
    const double n = static_cast<double>(f.size());
    double total = 0.0;
    Eigen::MatrixXd slope(f.rows(), f.cols());
    for (Eigen::Index r = 0; r < f.rows(); ++r) {
        const double q = quantiles[static_cast<std::size_t>(r)];
        check_quantile(q);
        for (Eigen::Index c = 0; c < f.cols(); ++c) {
            const double e = targets(c) - f(r, c);
            total += pinball(e, q);
            slope(r, c) = e > 0.0 ? -q : (e < 0.0 ? 1.0 - q : 0.0);
        }
    }
    slope /= n;
    return tape.record(Eigen::MatrixXd::Constant(1, 1, total / n), {forecast},
                       [forecast, slope = std::move(slope)](ad::Tape &t,
                                                            const Eigen::MatrixXd &g) {
                           t.accumulate(forecast, slope * g(0, 0));
                       });
}

std::vector<WindowedSample> make_windows(const Eigen::MatrixXd &series, Eigen::Index target_col,
                                         std::size_t k, std::size_t tau, IndexRange range) {
    const auto rows = static_cast<std::size_t>(series.rows());
    if (target_col < 0 || target_col >= series.cols()) {
        throw DataError("target column " + std::to_string(target_col) + " out of range");
    }
    if (k == 0 || tau == 0) {
        throw ConfigError("past and forecast steps must be at least 1");
    }
    if (range.first > range.last || range.last >= rows) {
        throw DataError("row range [" + std::to_string(range.first) + ", " +
                        std::to_string(range.last) + "] does not fit a series of " +
                        std::to_string(rows) + " rows");
    }
    if (range.size() < k + tau) {
        throw DataError("row range [" + std::to_string(range.first) + ", " +
                        std::to_string(range.last) + "] is too short for " + std::to_string(k) +
                        " past and " + std::to_string(tau) + " future steps");
    }

    std::vector<Eigen::Index> past_cols;
    for (Eigen::Index c = 0; c < series.cols(); ++c) {
        if (c != target_col) {
            past_cols.push_back(c);
        }
    }
    if (past_cols.empty()) {
        throw DataError("series has no input columns besides the target");
    }
    const double time_scale = rows > 1 ? 1.0 / static_cast<double>(rows - 1) : 1.0;

    std::vector<WindowedSample> out;
    for (std::size_t t = range.first + k - 1; t + tau <= range.last; ++t) {
        WindowedSample s;
        s.anchor = t;
        s.past.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(past_cols.size()));
        for (std::size_t i = 0; i < k; ++i) {
            const auto r = static_cast<Eigen::Index>(t + 1 - k + i);
            for (std::size_t j = 0; j < past_cols.size(); ++j) {
                s.past(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    series(r, past_cols[j]);
            }
        }
        s.future_known.resize(static_cast<Eigen::Index>(tau), 1);
        s.targets.resize(static_cast<Eigen::Index>(tau));
        for (std::size_t i = 0; i < tau; ++i) {
            const auto r = static_cast<Eigen::Index>(t + 1 + i);
            s.future_known(static_cast<Eigen::Index>(i), 0) = static_cast<double>(r) * time_scale;
            s.targets(static_cast<Eigen::Index>(i)) = series(r, target_col);
        }
        s.static_vars = Eigen::VectorXd::Ones(1);
        out.push_back(std::move(s));
    }
    return out;
}

MinMaxScaler MinMaxScaler::fit(const Eigen::MatrixXd &series, IndexRange rows) {
    if (rows.first > rows.last || rows.last >= static_cast<std::size_t>(series.rows())) {
        throw DataError("scaler fit range out of bounds");
    }
    const auto block = series.middleRows(static_cast<Eigen::Index>(rows.first),
                                         static_cast<Eigen::Index>(rows.size()));
    return {block.colwise().minCoeff(), block.colwise().maxCoeff()};
}

Eigen::MatrixXd MinMaxScaler::transform(const Eigen::MatrixXd &series) const {
    if (series.cols() != lo.size()) {
        throw ShapeError("scaler column count mismatch");
    }
    Eigen::MatrixXd out(series.rows(), series.cols());
    for (Eigen::Index c = 0; c < series.cols(); ++c) {
        const double span = hi(c) - lo(c);
        if (span > 0.0) {
            out.col(c) = (series.col(c).array() - lo(c)) / span;
        } else {
            out.col(c).setZero();
        }
    }
    return out;
}

void TrainConfig::validate() const {
    check_quantile(quantile);
    if (!std::isfinite(learning_rate) || learning_rate < 0.0) {
        throw ConfigError("learning rate must be finite and non-negative");
    }
    if (past_steps < 1 || forecast_steps < 1) {
        throw ConfigError("past and forecast steps must be at least 1");
    }
    if (train_range.first > train_range.last || test_range.first > test_range.last) {
        throw ConfigError("ranges must satisfy first <= last");
    }
    if (train_range.overlaps(test_range)) {
        throw ConfigError("train and test ranges overlap");
    }
    if (d_model < 1) {
        throw ConfigError("d_model must be at least 1");
    }
    if (ansatz_layers < 1) {
        throw ConfigError("ansatz layers must be at least 1");
    }
    if (heads < 1) {
        throw ConfigError("heads must be at least 1");
    }
}

model::ModelConfig TrainConfig::model_config(std::size_t num_past_vars) const {
    model::ModelConfig m;
    m.kind = model_kind;
    m.d_model = d_model;
    m.past_steps = past_steps;
    m.forecast_steps = forecast_steps;
    m.num_static_vars = 1;
    m.num_past_vars = num_past_vars;
    m.num_future_vars = 1;
    m.quantiles = {quantile};
    m.heads = heads;
    m.vqc.layers = ansatz_layers;
    return m;
}

namespace {

void check_samples(const std::vector<WindowedSample> &samples) {
    if (samples.empty()) {
        throw DataError("no samples");
    }
}

ad::Var batch_loss(ad::Tape &tape, const model::ForecastModel &model,
                   const std::vector<WindowedSample> &samples) {
    std::vector<ad::Var> losses;
    losses.reserve(samples.size());
    for (const auto &s : samples) {
        losses.push_back(quantile_loss(tape, model.forward(tape, s.inputs()), s.targets,
                                       model.config().quantiles));
    }
    return ad::average(losses);
}

} // namespace

TrainResult train(model::ForecastModel &model, const std::vector<WindowedSample> &samples,
                  const TrainConfig &cfg, const EpochCallback &on_epoch) {
    cfg.validate();
    check_samples(samples);
    const double points = static_cast<double>(samples.size() * cfg.forecast_steps *
                                              model.config().quantiles.size());
    TrainResult result;
    result.loss_history.reserve(cfg.epochs + 1);
    result.sum_history.reserve(cfg.epochs + 1);
    model.params().zero_grad();
    for (std::size_t epoch = 0; epoch <= cfg.epochs; ++epoch) {
        ad::Tape tape;
        const ad::Var loss = batch_loss(tape, model, samples);
        const double value = loss.scalar();
        if (!std::isfinite(value)) {
            throw TrainingDivergedError(epoch);
        }
        result.loss_history.push_back(value);
        result.sum_history.push_back(value * points);
        if (on_epoch) {
            on_epoch(epoch, value);
        }
        if (epoch < cfg.epochs) {
            tape.backward(loss);
            ad::sgd_step(model.params(), cfg.learning_rate);
        }
    }
    return result;
}

double evaluate(const model::ForecastModel &model, const std::vector<WindowedSample> &samples) {
    check_samples(samples);
    ad::Tape tape;
    return batch_loss(tape, model, samples).scalar();
}

Eigen::MatrixXd predict(const model::ForecastModel &model,
                        const std::vector<WindowedSample> &samples) {
    if (samples.empty()) {
        return {};
    }
    Eigen::MatrixXd out(static_cast<Eigen::Index>(samples.size()),
                        static_cast<Eigen::Index>(model.config().forecast_steps));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = model.predict(samples[i].inputs()).row(0);
    }
    return out;
}

} // namespace qtft::forecast
