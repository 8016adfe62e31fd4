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
 * The temporal fusion forward pass, shared by the classical model and its
 * quantum counterpart through a block policy.
 *
 * Per window: embeddings -> variable selection (static; past and future
 * conditioned on c_s) -> LSTM encoder/decoder seeded with (h, c) = (c_h, c_c)
 * -> gate + add + norm -> static enrichment with c_e -> self-attention over
 * all k + tau_max positions -> gate + add + norm -> position-wise residual
 * block -> gate + add + norm against the LSTM skip -> one dense head per
 * quantile on the future positions.
 */
#pragma once

#include "qtft/nn/variable_selection.hpp"
#include "qtft/qnn/blocks.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <string_view>
#include <variant>

namespace qtft::model {

using ad::Tape;
using ad::Var;

enum class ModelKind { Tft, Qtft, QtftQlstm };

[[nodiscard]] std::string_view to_string(ModelKind kind) noexcept;
/// Accepts "tft", "qtft", "qtft-qlstm"; throws ConfigError otherwise.
[[nodiscard]] ModelKind parse_model_kind(std::string_view name);

struct ModelConfig {
    ModelKind kind = ModelKind::Tft;
    Eigen::Index d_model = 2;
    std::size_t past_steps = 2;
    std::size_t forecast_steps = 2;
    std::size_t num_static_vars = 1;
    std::size_t num_past_vars = 4;
    std::size_t num_future_vars = 1;
    std::vector<double> quantiles{0.5};
    std::size_t heads = 1;
    bool causal_attention = false;
    bool share_selection_blocks = false;
    nn::LayerNormConfig norm;
    qnn::VqcConfig vqc;

    /// Throws ConfigError for empty or non-positive dimensions.
    void validate() const;
};

/// One window's inputs. Rows of `past` and `future` are time steps.
struct ModelInputs {
    Eigen::VectorXd static_vars;
    Eigen::MatrixXd past;   // past_steps x num_past_vars
    Eigen::MatrixXd future; // forecast_steps x num_future_vars
};

struct ClassicalBlocks {
    using Residual = nn::GrnParams;
    using Gating = nn::GluParams;
    using Attention = nn::AttentionParams;

    static Residual make_residual(ad::ParameterStore &store, const std::string &name,
                                  Eigen::Index width, Eigen::Index context_dim,
                                  const ModelConfig &cfg, nn::Rng &rng);
    static Var residual(Tape &tape, const Var &a, const std::optional<Var> &c,
                        const Residual &p);
    static Gating make_gating(ad::ParameterStore &store, const std::string &name,
                              const ModelConfig &cfg, nn::Rng &rng);
    static Var gating(Tape &tape, const Var &x, const Gating &p);
    static Attention make_attention(ad::ParameterStore &store, const std::string &name,
                                    const ModelConfig &cfg, nn::Rng &rng);
    static Var attend(Tape &tape, const Var &s, const Attention &p);
};

struct QuantumBlocks {
    using Residual = qnn::QgrnParams;
    using Gating = qnn::QgluParams;
    using Attention = qnn::QAttentionParams;

    static Residual make_residual(ad::ParameterStore &store, const std::string &name,
                                  Eigen::Index width, Eigen::Index context_dim,
                                  const ModelConfig &cfg, nn::Rng &rng);
    static Var residual(Tape &tape, const Var &a, const std::optional<Var> &c,
                        const Residual &p);
    static Gating make_gating(ad::ParameterStore &store, const std::string &name,
                              const ModelConfig &cfg, nn::Rng &rng);
    static Var gating(Tape &tape, const Var &x, const Gating &p);
    static Attention make_attention(ad::ParameterStore &store, const std::string &name,
                                    const ModelConfig &cfg, nn::Rng &rng);
    static Var attend(Tape &tape, const Var &s, const Attention &p);
};

using Recurrent = std::variant<nn::LstmParams, qnn::QlstmParams>;

template <class Blocks> struct FusionParams {
    using Residual = typename Blocks::Residual;
    using Gating = typename Blocks::Gating;

    std::vector<nn::DenseParams> static_embed;
    std::vector<nn::DenseParams> past_embed;
    std::vector<nn::DenseParams> future_embed;
    nn::VariableSelectionParams<Residual> static_select;
    nn::VariableSelectionParams<Residual> past_select;
    nn::VariableSelectionParams<Residual> future_select;
    std::array<Residual, 4> static_encoders; // c_s, c_e, c_c, c_h
    Recurrent encoder;
    Recurrent decoder;
    Gating post_lstm_gate;
    nn::LayerNormParams post_lstm_norm;
    Residual enrichment;
    typename Blocks::Attention attention;
    Gating post_attention_gate;
    nn::LayerNormParams post_attention_norm;
    Residual positionwise;
    Gating output_gate;
    nn::LayerNormParams output_norm;
    std::vector<nn::DenseParams> quantile_heads; // d_model -> 1 each
};

using TftParams = FusionParams<ClassicalBlocks>;
using QtftParams = FusionParams<QuantumBlocks>;

template <class Blocks>
[[nodiscard]] FusionParams<Blocks> make_fusion_params(ad::ParameterStore &store,
                                                      const ModelConfig &cfg, nn::Rng &rng);

/// Forecast matrix of shape (num_quantiles, forecast_steps).
template <class Blocks>
[[nodiscard]] Var fusion_forward(Tape &tape, const ModelInputs &inputs,
                                 const FusionParams<Blocks> &p, const ModelConfig &cfg);

[[nodiscard]] Var tft_forward(Tape &tape, const ModelInputs &inputs, const TftParams &p,
                              const ModelConfig &cfg);
[[nodiscard]] Var qtft_forward(Tape &tape, const ModelInputs &inputs, const QtftParams &p,
                               const ModelConfig &cfg);

/// A model instance: configuration, owned parameters and the forward pass.
class ForecastModel {
  public:
    virtual ~ForecastModel() = default;

    [[nodiscard]] const ModelConfig &config() const noexcept { return config_; }
    [[nodiscard]] ad::ParameterStore &params() noexcept { return store_; }
    [[nodiscard]] const ad::ParameterStore &params() const noexcept { return store_; }
    [[nodiscard]] std::size_t num_trainable() const noexcept { return store_.num_scalars(); }

    [[nodiscard]] virtual Var forward(Tape &tape, const ModelInputs &inputs) const = 0;

    /// Forward pass without gradient bookkeeping.
    [[nodiscard]] Eigen::MatrixXd predict(const ModelInputs &inputs) const;

  protected:
    explicit ForecastModel(ModelConfig config) : config_(std::move(config)) {}

    ModelConfig config_;
    ad::ParameterStore store_;
};

/// Builds and initialises a model; identical (config, seed) pairs produce
/// identical parameters.
[[nodiscard]] std::unique_ptr<ForecastModel> make_model(const ModelConfig &config,
                                                        std::uint64_t seed);

} // namespace qtft::model
