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
#include "qtft/model/fusion.hpp"

#include "qtft/qnn/variable_selection.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace qtft::model {

std::string_view to_string(ModelKind kind) noexcept {
    switch (kind) {
    case ModelKind::Qtft:
        return "qtft";
    case ModelKind::QtftQlstm:
        return "qtft-qlstm";
    case ModelKind::Tft:
        break;
    }
    return "tft";
}

ModelKind parse_model_kind(std::string_view name) {
    std::string lower(name);
    std::ranges::transform(lower, lower.begin(),
                           [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    if (lower == "tft") {
        return ModelKind::Tft;
    }
    if (lower == "qtft") {
        return ModelKind::Qtft;
    }
    if (lower == "qtft-qlstm" || lower == "qtft_qlstm") {
        return ModelKind::QtftQlstm;
    }
    throw ConfigError("unknown model kind '" + std::string(name) +
                      "' (expected tft, qtft or qtft-qlstm)");
}

void ModelConfig::validate() const {
    if (d_model < 1) {
        throw ConfigError("d_model must be at least 1");
    }
    if (past_steps < 1 || forecast_steps < 1) {
        throw ConfigError("past and forecast steps must be at least 1");
    }
    if (num_static_vars < 1 || num_past_vars < 1 || num_future_vars < 1) {
        throw ConfigError("every input stream needs at least one variable");
    }
    if (quantiles.empty()) {
        throw ConfigError("at least one quantile is required");
    }
    for (double q : quantiles) {
        if (!(q > 0.0 && q < 1.0)) {
            throw ConfigError("quantiles must lie in (0, 1)");
        }
    }
    if (heads < 1) {
        throw ConfigError("attention needs at least one head");
    }
    if (kind != ModelKind::Tft && vqc.layers < 1) {
        throw ConfigError("ansatz layers must be at least 1");
    }
}

// Classical policy

ClassicalBlocks::Residual ClassicalBlocks::make_residual(ad::ParameterStore &store,
                                                        const std::string &name,
                                                        Eigen::Index width,
                                                        Eigen::Index context_dim,
                                                        const ModelConfig &cfg, nn::Rng &rng) {
    return nn::make_grn(store, name, width, context_dim, cfg.norm, rng);
}

Var ClassicalBlocks::residual(Tape &tape, const Var &a, const std::optional<Var> &c,
                              const Residual &p) {
    return nn::grn(tape, a, c, p);
}

ClassicalBlocks::Gating ClassicalBlocks::make_gating(ad::ParameterStore &store,
                                                    const std::string &name,
                                                    const ModelConfig &cfg, nn::Rng &rng) {
    return nn::make_glu(store, name, cfg.d_model, cfg.d_model, rng);
}

Var ClassicalBlocks::gating(Tape &tape, const Var &x, const Gating &p) {
    return nn::glu(tape, x, p);
}

ClassicalBlocks::Attention ClassicalBlocks::make_attention(ad::ParameterStore &store,
                                                          const std::string &name,
                                                          const ModelConfig &cfg,
                                                          nn::Rng &rng) {
    return nn::make_attention(store, name, cfg.d_model, cfg.heads, cfg.causal_attention, rng);
}

Var ClassicalBlocks::attend(Tape &tape, const Var &s, const Attention &p) {
    return nn::interpretable_multi_head(tape, s, p);
}

// Quantum policy

QuantumBlocks::Residual QuantumBlocks::make_residual(ad::ParameterStore &store,
                                                    const std::string &name,
                                                    Eigen::Index width,
                                                    Eigen::Index context_dim,
                                                    const ModelConfig &cfg, nn::Rng &rng) {
    return qnn::make_qgrn(store, name, static_cast<std::size_t>(width), context_dim, cfg.vqc,
                          cfg.norm, rng);
}

Var QuantumBlocks::residual(Tape &tape, const Var &a, const std::optional<Var> &c,
                            const Residual &p) {
    return qnn::qgrn(tape, a, c, p);
}

QuantumBlocks::Gating QuantumBlocks::make_gating(ad::ParameterStore &store,
                                                const std::string &name,
                                                const ModelConfig &cfg, nn::Rng &rng) {
    return qnn::make_qglu(store, name, static_cast<std::size_t>(cfg.d_model), cfg.vqc, rng);
}

Var QuantumBlocks::gating(Tape &tape, const Var &x, const Gating &p) {
    return qnn::qglu(tape, x, p);
}

QuantumBlocks::Attention QuantumBlocks::make_attention(ad::ParameterStore &store,
                                                      const std::string &name,
                                                      const ModelConfig &cfg, nn::Rng &rng) {
    return qnn::make_q_attention(store, name, static_cast<std::size_t>(cfg.d_model), cfg.heads,
                                 cfg.causal_attention, cfg.vqc, rng);
}

Var QuantumBlocks::attend(Tape &tape, const Var &s, const Attention &p) {
    return qnn::q_interpretable_multi_head(tape, s, p);
}

namespace {

std::vector<nn::DenseParams> make_embeddings(ad::ParameterStore &store, const std::string &name,
                                             std::size_t count, Eigen::Index d_model,
                                             nn::Rng &rng) {
    std::vector<nn::DenseParams> out;
    out.reserve(count);
    for (std::size_t j = 0; j < count; ++j) {
        out.push_back(nn::make_dense(store, name + std::to_string(j), 1, d_model, true, rng));
    }
    return out;
}

std::vector<Var> embed_row(Tape &tape, const std::vector<nn::DenseParams> &embed,
                           const Eigen::Ref<const Eigen::VectorXd> &row) {
    std::vector<Var> out;
    out.reserve(embed.size());
    for (std::size_t j = 0; j < embed.size(); ++j) {
        const Var x = tape.constant(Eigen::MatrixXd::Constant(1, 1, row(static_cast<Eigen::Index>(j))));
        out.push_back(nn::dense(tape, embed[j], x));
    }
    return out;
}

Recurrent make_recurrent(ad::ParameterStore &store, const std::string &name,
                         const ModelConfig &cfg, nn::Rng &rng) {
    if (cfg.kind == ModelKind::QtftQlstm) {
        return qnn::make_qlstm(store, name, cfg.d_model, static_cast<std::size_t>(cfg.d_model),
                               cfg.vqc, rng);
    }
    return nn::make_lstm(store, name, cfg.d_model, cfg.d_model, rng);
}

std::vector<Var> run_recurrent(Tape &tape, std::span<const Var> inputs,
                               const nn::LstmState &initial, const Recurrent &p,
                               nn::LstmState *last) {
    return std::visit(
        [&](const auto &params) -> std::vector<Var> {
            using T = std::decay_t<decltype(params)>;
            if constexpr (std::is_same_v<T, nn::LstmParams>) {
                return nn::lstm_seq(tape, inputs, initial, params, last);
            } else {
                return qnn::qlstm_seq(tape, inputs, initial, params, last);
            }
        },
        p);
}

void check_inputs(const ModelInputs &in, const ModelConfig &cfg) {
    auto fail = [](const std::string &what, Eigen::Index r, Eigen::Index c, std::size_t er,
                   std::size_t ec) {
        throw ShapeError(what + ": expected " + std::to_string(er) + "x" + std::to_string(ec) +
                         ", got " + std::to_string(r) + "x" + std::to_string(c));
    };
    if (static_cast<std::size_t>(in.static_vars.size()) != cfg.num_static_vars) {
        fail("static inputs", in.static_vars.size(), 1, cfg.num_static_vars, 1);
    }
    if (static_cast<std::size_t>(in.past.rows()) != cfg.past_steps ||
        static_cast<std::size_t>(in.past.cols()) != cfg.num_past_vars) {
        fail("past inputs", in.past.rows(), in.past.cols(), cfg.past_steps, cfg.num_past_vars);
    }
    if (static_cast<std::size_t>(in.future.rows()) != cfg.forecast_steps ||
        static_cast<std::size_t>(in.future.cols()) != cfg.num_future_vars) {
        fail("future inputs", in.future.rows(), in.future.cols(), cfg.forecast_steps,
             cfg.num_future_vars);
    }
}

template <class Blocks>
nn::Selection select(Tape &tape, std::span<const Var> embeddings,
                     const std::optional<Var> &context,
                     const nn::VariableSelectionParams<typename Blocks::Residual> &p) {
    return nn::select_variables(tape, embeddings, context, p,
                                [](Tape &t, const typename Blocks::Residual &b, const Var &a,
                                   const std::optional<Var> &c) {
                                    return Blocks::residual(t, a, c, b);
                                });
}

} // namespace

template <class Blocks>
FusionParams<Blocks> make_fusion_params(ad::ParameterStore &store, const ModelConfig &cfg,
                                        nn::Rng &rng) {
    cfg.validate();
    const Eigen::Index d = cfg.d_model;
    FusionParams<Blocks> p;
    auto make_block = [&](const std::string &name, Eigen::Index width, Eigen::Index ctx) {
        return Blocks::make_residual(store, name, width, ctx, cfg, rng);
    };
    using Residual = typename Blocks::Residual;

    p.static_embed = make_embeddings(store, "embed.static", cfg.num_static_vars, d, rng);
    p.past_embed = make_embeddings(store, "embed.past", cfg.num_past_vars, d, rng);
    p.future_embed = make_embeddings(store, "embed.future", cfg.num_future_vars, d, rng);

    p.static_select = nn::make_variable_selection<Residual>(
        store, "vsn.static", cfg.num_static_vars, d, 0, cfg.share_selection_blocks, rng,
        make_block);
    p.past_select = nn::make_variable_selection<Residual>(
        store, "vsn.past", cfg.num_past_vars, d, d, cfg.share_selection_blocks, rng, make_block);
    p.future_select = nn::make_variable_selection<Residual>(
        store, "vsn.future", cfg.num_future_vars, d, d, cfg.share_selection_blocks, rng,
        make_block);

    p.static_encoders = {make_block("static.selection", d, 0),
                         make_block("static.enrichment", d, 0), make_block("static.cell", d, 0),
                         make_block("static.hidden", d, 0)};

    p.encoder = make_recurrent(store, "lstm.encoder", cfg, rng);
    p.decoder = make_recurrent(store, "lstm.decoder", cfg, rng);
    p.post_lstm_gate = Blocks::make_gating(store, "post_lstm.gate", cfg, rng);
    p.post_lstm_norm = nn::make_layer_norm(store, "post_lstm.norm", d, cfg.norm);

    p.enrichment = make_block("enrichment", d, d);
    p.attention = Blocks::make_attention(store, "attention", cfg, rng);
    p.post_attention_gate = Blocks::make_gating(store, "post_attention.gate", cfg, rng);
    p.post_attention_norm = nn::make_layer_norm(store, "post_attention.norm", d, cfg.norm);

    p.positionwise = make_block("positionwise", d, 0);
    p.output_gate = Blocks::make_gating(store, "output.gate", cfg, rng);
    p.output_norm = nn::make_layer_norm(store, "output.norm", d, cfg.norm);

    for (std::size_t q = 0; q < cfg.quantiles.size(); ++q) {
        p.quantile_heads.push_back(
            nn::make_dense(store, "head.q" + std::to_string(q), d, 1, true, rng));
    }
    return p;
}

template <class Blocks>
Var fusion_forward(Tape &tape, const ModelInputs &inputs, const FusionParams<Blocks> &p,
                   const ModelConfig &cfg) {
    check_inputs(inputs, cfg);
    const std::size_t k = cfg.past_steps;
    const std::size_t tau = cfg.forecast_steps;

    const auto xi_emb = embed_row(tape, p.static_embed, inputs.static_vars);
    const Var xi = select<Blocks>(tape, xi_emb, std::nullopt, p.static_select).selected;
    const nn::StaticContexts ctx =
        nn::encode_static(tape, xi, p.static_encoders,
                          [](Tape &t, const typename Blocks::Residual &b, const Var &a,
                             const std::optional<Var> &c) { return Blocks::residual(t, a, c, b); });

    std::vector<Var> selected;
    selected.reserve(k + tau);
    for (std::size_t t = 0; t < k; ++t) {
        const auto emb = embed_row(tape, p.past_embed,
                                   inputs.past.row(static_cast<Eigen::Index>(t)).transpose());
        selected.push_back(select<Blocks>(tape, emb, ctx.selection, p.past_select).selected);
    }
    for (std::size_t t = 0; t < tau; ++t) {
        const auto emb = embed_row(tape, p.future_embed,
                                   inputs.future.row(static_cast<Eigen::Index>(t)).transpose());
        selected.push_back(select<Blocks>(tape, emb, ctx.selection, p.future_select).selected);
    }

    nn::LstmState state{ctx.hidden, ctx.cell};
    const std::span<const Var> all(selected);
    std::vector<Var> phi = run_recurrent(tape, all.first(k), state, p.encoder, &state);
    const std::vector<Var> decoded = run_recurrent(tape, all.subspan(k), state, p.decoder, nullptr);
    phi.insert(phi.end(), decoded.begin(), decoded.end());

    const std::size_t n = k + tau;
    std::vector<Var> skip(n);
    std::vector<Var> enriched(n);
    for (std::size_t i = 0; i < n; ++i) {
        skip[i] = nn::layer_norm(
            tape, ad::add(selected[i], Blocks::gating(tape, phi[i], p.post_lstm_gate)),
            p.post_lstm_norm);
        enriched[i] = Blocks::residual(tape, skip[i], ctx.enrichment, p.enrichment);
    }

    const Var attended = Blocks::attend(tape, ad::stack_rows(enriched), p.attention);

    std::vector<Var> columns;
    columns.reserve(tau);
    for (std::size_t i = k; i < n; ++i) {
        const Var beta = ad::row(attended, static_cast<Eigen::Index>(i));
        const Var delta = nn::layer_norm(
            tape, ad::add(enriched[i], Blocks::gating(tape, beta, p.post_attention_gate)),
            p.post_attention_norm);
        const Var psi = Blocks::residual(tape, delta, std::nullopt, p.positionwise);
        const Var out = nn::layer_norm(
            tape, ad::add(skip[i], Blocks::gating(tape, psi, p.output_gate)), p.output_norm);
        std::vector<Var> per_quantile;
        per_quantile.reserve(p.quantile_heads.size());
        for (const auto &head : p.quantile_heads) {
            per_quantile.push_back(nn::dense(tape, head, out));
        }
        columns.push_back(ad::concat(per_quantile));
    }
    return ad::hstack(columns);
}

template TftParams make_fusion_params<ClassicalBlocks>(ad::ParameterStore &, const ModelConfig &,
                                                       nn::Rng &);
template QtftParams make_fusion_params<QuantumBlocks>(ad::ParameterStore &, const ModelConfig &,
                                                      nn::Rng &);
template Var fusion_forward<ClassicalBlocks>(Tape &, const ModelInputs &, const TftParams &,
                                             const ModelConfig &);
template Var fusion_forward<QuantumBlocks>(Tape &, const ModelInputs &, const QtftParams &,
                                           const ModelConfig &);

Var tft_forward(Tape &tape, const ModelInputs &inputs, const TftParams &p,
                const ModelConfig &cfg) {
    return fusion_forward<ClassicalBlocks>(tape, inputs, p, cfg);
}

Var qtft_forward(Tape &tape, const ModelInputs &inputs, const QtftParams &p,
                 const ModelConfig &cfg) {
    return fusion_forward<QuantumBlocks>(tape, inputs, p, cfg);
}

Eigen::MatrixXd ForecastModel::predict(const ModelInputs &inputs) const {
    Tape tape;
    return forward(tape, inputs).value();
}

namespace {

template <class Blocks> class FusionModel final : public ForecastModel {
  public:
    FusionModel(const ModelConfig &config, std::uint64_t seed) : ForecastModel(config) {
        nn::Rng rng(seed);
        params_ = make_fusion_params<Blocks>(store_, config_, rng);
    }

    Var forward(Tape &tape, const ModelInputs &inputs) const override {
        return fusion_forward<Blocks>(tape, inputs, params_, config_);
    }

  private:
    FusionParams<Blocks> params_;
};

} // namespace

std::unique_ptr<ForecastModel> make_model(const ModelConfig &config, std::uint64_t seed) {
    config.validate();
    if (config.kind == ModelKind::Tft) {
        return std::make_unique<FusionModel<ClassicalBlocks>>(config, seed);
    }
    return std::make_unique<FusionModel<QuantumBlocks>>(config, seed);
}

} // namespace qtft::model
