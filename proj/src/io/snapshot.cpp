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
#include "qtft/io/snapshot.hpp"

#include "qtft/error.hpp"
#include "qtft/io/csv.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace qtft::io {

namespace {

constexpr const char *kMagic = "qtft-parameters 1";

std::string join(const std::vector<double> &v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out += (i ? "," : "") + format_double(v[i]);
    }
    return out;
}

std::string encoding_name(qnn::Encoding e) { return e == qnn::Encoding::ZZ ? "zz" : "angle"; }
std::string ansatz_name(qnn::Ansatz a) {
    return a == qnn::Ansatz::NLocal ? "n-local" : "basic-entangler";
}

sim::Rotation parse_rotation(const std::string &s) {
    if (s == "RX") {
        return sim::Rotation::RX;
    }
    if (s == "RY") {
        return sim::Rotation::RY;
    }
    if (s == "RZ") {
        return sim::Rotation::RZ;
    }
    throw DataError("snapshot: unknown rotation '" + s + "'");
}

double real(const std::string &key, const std::string &s) {
    double v = 0.0;
    if (!parse_double(s, v)) {
        throw DataError("snapshot: bad value for " + key + ": '" + s + "'");
    }
    return v;
}

std::size_t count(const std::string &key, const std::string &s) {
    const double v = real(key, s);
    if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
        throw DataError("snapshot: bad count for " + key + ": '" + s + "'");
    }
    return static_cast<std::size_t>(v);
}

bool flag(const std::string &key, const std::string &s) {
    if (s == "true" || s == "false") {
        return s == "true";
    }
    throw DataError("snapshot: bad flag for " + key + ": '" + s + "'");
}

} // namespace

std::vector<std::pair<std::string, std::string>>
model_config_entries(const model::ModelConfig &c) {
    auto b = [](bool v) { return std::string(v ? "true" : "false"); };
    return {
        {"kind", std::string(model::to_string(c.kind))},
        {"d_model", std::to_string(c.d_model)},
        {"past_steps", std::to_string(c.past_steps)},
        {"forecast_steps", std::to_string(c.forecast_steps)},
        {"num_static_vars", std::to_string(c.num_static_vars)},
        {"num_past_vars", std::to_string(c.num_past_vars)},
        {"num_future_vars", std::to_string(c.num_future_vars)},
        {"quantiles", join(c.quantiles)},
        {"heads", std::to_string(c.heads)},
        {"causal_attention", b(c.causal_attention)},
        {"share_selection_blocks", b(c.share_selection_blocks)},
        {"norm_eps", format_double(c.norm.eps)},
        {"norm_affine", b(c.norm.affine)},
        {"encoding", encoding_name(c.vqc.encoding)},
        {"embedding_rotation", std::string(sim::to_string(c.vqc.embedding_rotation))},
        {"zz_reps", std::to_string(c.vqc.zz_reps)},
        {"ansatz", ansatz_name(c.vqc.ansatz)},
        {"entangler_rotation", std::string(sim::to_string(c.vqc.entangler_rotation))},
        {"layers", std::to_string(c.vqc.layers)},
    };
}

model::ModelConfig
model_config_from_entries(const std::vector<std::pair<std::string, std::string>> &entries) {
    model::ModelConfig c;
    std::set<std::string> seen;
    for (const auto &[k, v] : entries) {
        seen.insert(k);
        if (k == "kind") {
            c.kind = model::parse_model_kind(v);
        } else if (k == "d_model") {
            c.d_model = static_cast<Eigen::Index>(count(k, v));
        } else if (k == "past_steps") {
            c.past_steps = count(k, v);
        } else if (k == "forecast_steps") {
            c.forecast_steps = count(k, v);
        } else if (k == "num_static_vars") {
            c.num_static_vars = count(k, v);
        } else if (k == "num_past_vars") {
            c.num_past_vars = count(k, v);
        } else if (k == "num_future_vars") {
            c.num_future_vars = count(k, v);
        } else if (k == "quantiles") {
            c.quantiles.clear();
            for (const auto &f : split_csv_line(v)) {
                c.quantiles.push_back(real(k, f));
            }
        } else if (k == "heads") {
            c.heads = count(k, v);
        } else if (k == "causal_attention") {
            c.causal_attention = flag(k, v);
        } else if (k == "share_selection_blocks") {
            c.share_selection_blocks = flag(k, v);
        } else if (k == "norm_eps") {
            c.norm.eps = real(k, v);
        } else if (k == "norm_affine") {
            c.norm.affine = flag(k, v);
        } else if (k == "encoding") {
            if (v != "angle" && v != "zz") {
                throw DataError("snapshot: unknown encoding '" + v + "'");
            }
            c.vqc.encoding = v == "zz" ? qnn::Encoding::ZZ : qnn::Encoding::Angle;
        } else if (k == "embedding_rotation") {
            c.vqc.embedding_rotation = parse_rotation(v);
        } else if (k == "zz_reps") {
            c.vqc.zz_reps = count(k, v);
        } else if (k == "ansatz") {
            if (v != "basic-entangler" && v != "n-local") {
                throw DataError("snapshot: unknown ansatz '" + v + "'");
            }
            c.vqc.ansatz = v == "n-local" ? qnn::Ansatz::NLocal : qnn::Ansatz::BasicEntangler;
        } else if (k == "entangler_rotation") {
            c.vqc.entangler_rotation = parse_rotation(v);
        } else if (k == "layers") {
            c.vqc.layers = count(k, v);
        } else {
            throw DataError("snapshot: unknown config key '" + k + "'");
        }
    }
    if (!seen.contains("kind")) {
        throw DataError("snapshot: config has no model kind");
    }
    return c;
}

void save_snapshot(const model::ForecastModel &model, const std::filesystem::path &path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write '" + path.string() + "'");
    }
    out << kMagic << '\n';
    for (const auto &[k, v] : model_config_entries(model.config())) {
        out << k << '=' << v << '\n';
    }
    out << "end-config\n";
    for (const auto &p : model.params()) {
        out << "param " << p.name << ' ' << p.value.rows() << ' ' << p.value.cols() << '\n';
        for (Eigen::Index i = 0; i < p.value.size(); ++i) {
            out << (i ? " " : "") << format_double(p.value.data()[i]);
        }
        out << '\n';
    }
    out.flush();
    if (!out) {
        throw Error("write failed for '" + path.string() + "'");
    }
}

std::unique_ptr<model::ForecastModel> load_snapshot(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open snapshot '" + path.string() + "'");
    }
    std::string line;
    if (!std::getline(in, line) || line != kMagic) {
        throw DataError("'" + path.string() + "' is not a parameter snapshot");
    }
    std::vector<std::pair<std::string, std::string>> entries;
    while (std::getline(in, line) && line != "end-config") {
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw DataError("snapshot: bad config line '" + line + "'");
        }
        entries.emplace_back(line.substr(0, eq), line.substr(eq + 1));
    }
    auto model = model::make_model(model_config_from_entries(entries), 0);

    std::set<std::string> loaded;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream head(line);
        std::string tag;
        std::string name;
        Eigen::Index rows = 0;
        Eigen::Index cols = 0;
        if (!(head >> tag >> name >> rows >> cols) || tag != "param") {
            throw DataError("snapshot: bad parameter header '" + line + "'");
        }
        auto *p = model->params().find(name);
        if (p == nullptr) {
            throw DataError("snapshot: unknown parameter '" + name + "'");
        }
        if (p->value.rows() != rows || p->value.cols() != cols) {
            throw DataError("snapshot: shape mismatch for '" + name + "'");
        }
        if (!std::getline(in, line)) {
            throw DataError("snapshot: missing values for '" + name + "'");
        }
        std::istringstream body(line);
        std::string tok;
        Eigen::Index i = 0;
        while (body >> tok) {
            if (i >= p->value.size() || !parse_double(tok, p->value.data()[i])) {
                throw DataError("snapshot: bad values for '" + name + "'");
            }
            ++i;
        }
        if (i != p->value.size()) {
            throw DataError("snapshot: expected " + std::to_string(p->value.size()) +
                            " values for '" + name + "'");
        }
        loaded.insert(name);
    }
    if (loaded.size() != model->params().size()) {
        throw DataError("snapshot: " + std::to_string(model->params().size() - loaded.size()) +
                        " parameters missing");
    }
    return model;
}

} // namespace qtft::io
