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
#include "qtft/io/report.hpp"

#include "qtft/error.hpp"
#include "qtft/io/csv.hpp"

#include <fstream>
#include <sstream>

namespace qtft::io {

namespace {

constexpr const char *kFormat = "qtft-report-1";
constexpr const char *kPredictionHeader = "split,window,time_index,horizon,true,predicted";
constexpr const char *kLossHeader = "epoch,mean_loss,sum_loss";

std::ofstream open_out(const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write '" + path.string() + "'");
    }
    return out;
}

void finish(std::ofstream &out, const std::filesystem::path &path) {
    out.flush();
    if (!out) {
        throw Error("write failed for '" + path.string() + "'");
    }
}

void write_loss(std::ostream &out, const RunReport &r) {
    out << kLossHeader << '\n';
    for (std::size_t e = 0; e < r.loss_history.size(); ++e) {
        out << e << ',' << format_double(r.loss_history[e]) << ','
            << (e < r.sum_history.size() ? format_double(r.sum_history[e]) : "") << '\n';
    }
}

double to_double(const std::string &s, const std::string &what) {
    double v = 0.0;
    if (!parse_double(s, v)) {
        throw DataError("report: bad value for " + what + ": '" + s + "'");
    }
    return v;
}

std::size_t to_size(const std::string &s, const std::string &what) {
    try {
        std::size_t pos = 0;
        const auto v = std::stoull(s, &pos);
        if (pos != s.size()) {
            throw DataError("");
        }
        return static_cast<std::size_t>(v);
    } catch (const std::exception &) {
        throw DataError("report: bad integer for " + what + ": '" + s + "'");
    }
}

} // namespace

void write_prediction_table(std::ostream &out, const std::vector<PredictionRow> &rows) {
    out << kPredictionHeader << '\n';
    for (const auto &p : rows) {
        out << p.split << ',' << p.window << ',' << p.time_index << ',' << p.horizon << ','
            << format_double(p.truth) << ',' << format_double(p.predicted) << '\n';
    }
}

std::vector<PredictionRow> read_prediction_table(std::istream &in) {
    std::string line;
    if (!std::getline(in, line) || line != kPredictionHeader) {
        throw DataError("prediction table: unexpected header");
    }
    std::vector<PredictionRow> rows;
    while (std::getline(in, line) && !line.empty() && line.front() != '[') {
        const auto f = split_csv_line(line);
        if (f.size() != 6) {
            throw DataError("prediction table: expected 6 fields in '" + line + "'");
        }
        rows.push_back({f[0], to_size(f[1], "window"), to_size(f[2], "time_index"),
                        to_size(f[3], "horizon"), to_double(f[4], "true"),
                        to_double(f[5], "predicted")});
    }
    return rows;
}

void write_report(const RunReport &r, const std::filesystem::path &dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw Error("cannot create '" + dir.string() + "': " + ec.message());
    }

    const auto report_path = dir / "report.txt";
    auto out = open_out(report_path);
    out << "format=" << kFormat << '\n'
        << "model=" << r.model << '\n'
        << "seed=" << r.seed << '\n'
        << "parameters=" << r.parameter_count << '\n'
        << "epochs=" << (r.loss_history.empty() ? 0 : r.loss_history.size() - 1) << '\n'
        << "final_train_loss=" << format_double(r.final_train_loss) << '\n'
        << "final_test_loss=" << format_double(r.final_test_loss) << '\n';
    for (const auto &[k, v] : r.config) {
        out << "config." << k << '=' << v << '\n';
    }
    out << "\n[loss]\n";
    write_loss(out, r);
    out << "\n[predictions]\n";
    write_prediction_table(out, r.predictions);
    finish(out, report_path);

    const auto loss_path = dir / "loss.csv";
    auto loss = open_out(loss_path);
    write_loss(loss, r);
    finish(loss, loss_path);

    const auto pred_path = dir / "predictions.csv";
    auto pred = open_out(pred_path);
    write_prediction_table(pred, r.predictions);
    finish(pred, pred_path);

    const auto timing_path = dir / "timing.txt";
    auto timing = open_out(timing_path);
    timing << "wall_clock_seconds=" << format_double(r.wall_clock_seconds) << '\n';
    finish(timing, timing_path);
}

RunReport read_report(const std::filesystem::path &dir) {
    std::ifstream in(dir / "report.txt", std::ios::binary);
    if (!in) {
        throw DataError("cannot open '" + (dir / "report.txt").string() + "'");
    }
    RunReport r;
    std::string line;
    bool versioned = false;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        if (line == "[loss]") {
            if (!std::getline(in, line) || line != kLossHeader) {
                throw DataError("report: bad loss header");
            }
            while (std::getline(in, line) && !line.empty()) {
                const auto f = split_csv_line(line);
                if (f.size() != 3 || to_size(f[0], "epoch") != r.loss_history.size()) {
                    throw DataError("report: bad loss row '" + line + "'");
                }
                r.loss_history.push_back(to_double(f[1], "mean_loss"));
                if (!f[2].empty()) {
                    r.sum_history.push_back(to_double(f[2], "sum_loss"));
                }
            }
            continue;
        }
        if (line == "[predictions]") {
            r.predictions = read_prediction_table(in);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw DataError("report: unexpected line '" + line + "'");
        }
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "format") {
            if (value != kFormat) {
                throw DataError("report: unsupported format '" + value + "'");
            }
            versioned = true;
        } else if (key == "model") {
            r.model = value;
        } else if (key == "seed") {
            r.seed = to_size(value, key);
        } else if (key == "parameters") {
            r.parameter_count = to_size(value, key);
        } else if (key == "final_train_loss") {
            r.final_train_loss = to_double(value, key);
        } else if (key == "final_test_loss") {
            r.final_test_loss = to_double(value, key);
        } else if (key.starts_with("config.")) {
            r.config.emplace_back(key.substr(7), value);
        }
    }
    if (!versioned) {
        throw DataError("report: missing format line");
    }
    std::ifstream timing(dir / "timing.txt");
    if (timing && std::getline(timing, line) && line.starts_with("wall_clock_seconds=")) {
        r.wall_clock_seconds = to_double(line.substr(19), "wall_clock_seconds");
    }
    return r;
}

} // namespace qtft::io
