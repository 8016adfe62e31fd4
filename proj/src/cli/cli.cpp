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
#include "qtft/cli/cli.hpp"

#include "qtft/diagnostics/gradient_suite.hpp"
#include "qtft/error.hpp"
#include "qtft/forecast/forecasting.hpp"
#include "qtft/io/csv.hpp"
#include "qtft/io/report.hpp"
#include "qtft/io/snapshot.hpp"

#include <CLI11.hpp>

#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace qtft::cli {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct DataFlags {
    std::string data = "data/axisbank_2000_sample.csv";
    std::vector<std::string> features{"Open", "High", "Low", "Last"};
    std::string target = "Close";
    std::string train_range = "0:19";
    bool scale = false;
};

struct TrainFlags {
    DataFlags data;
    std::string model = "tft";
    std::size_t epochs = 100;
    double lr = 0.1;
    double quantile = 0.5;
    std::uint64_t seed = 7;
    std::size_t past_steps = 2;
    std::size_t forecast_steps = 2;
    std::string test_range = "20:26";
    long d_model = 2;
    std::size_t layers = 2;
    std::size_t heads = 1;
    std::string out;
    int verbosity = 0;
};

forecast::IndexRange parse_range(const std::string &text, const char *flag) {
    const auto colon = text.find(':');
    auto fail = [&]() -> forecast::IndexRange {
        throw ConfigError(std::string(flag) + " expects FIRST:LAST, got '" + text + "'");
    };
    if (colon == std::string::npos) {
        return fail();
    }
    double a = 0;
    double b = 0;
    if (!io::parse_double(text.substr(0, colon), a) || !io::parse_double(text.substr(colon + 1), b) ||
        a < 0 || b < a || a != static_cast<double>(static_cast<std::size_t>(a)) ||
        b != static_cast<double>(static_cast<std::size_t>(b))) {
        return fail();
    }
    return {static_cast<std::size_t>(a), static_cast<std::size_t>(b)};
}

std::string format_range(const forecast::IndexRange &r) {
    return std::to_string(r.first) + ":" + std::to_string(r.last);
}

fs::path default_output(const std::string &leaf) {
    const char *env = std::getenv(kOutputDirEnv);
    const fs::path base = env != nullptr && *env != '\0' ? fs::path(env) : fs::path("runs");
    return base / leaf;
}

void add_data_flags(CLI::App &cmd, DataFlags &d) {
    cmd.add_option("--data", d.data, "CSV file with a header row")->capture_default_str();
    cmd.add_option("--features", d.features, "observed input columns")
        ->delimiter(',')
        ->capture_default_str();
    cmd.add_option("--target", d.target, "target column")->capture_default_str();
    cmd.add_option("--train-range", d.train_range, "training rows FIRST:LAST (inclusive)")
        ->capture_default_str();
    cmd.add_flag("--scale", d.scale, "min-max scale every column on the training rows");
}

void add_train_flags(CLI::App &cmd, TrainFlags &f, bool with_model) {
    add_data_flags(cmd, f.data);
    if (with_model) {
        cmd.add_option("--model", f.model, "tft, qtft or qtft-qlstm")->capture_default_str();
    }
    cmd.add_option("--epochs", f.epochs)->capture_default_str();
    cmd.add_option("--lr", f.lr, "learning rate")->capture_default_str();
    cmd.add_option("--quantile", f.quantile)->capture_default_str();
    cmd.add_option("--seed", f.seed)->capture_default_str();
    cmd.add_option("--past-steps", f.past_steps)->capture_default_str();
    cmd.add_option("--forecast-steps", f.forecast_steps)->capture_default_str();
    cmd.add_option("--test-range", f.test_range, "test rows FIRST:LAST (inclusive)")
        ->capture_default_str();
    cmd.add_option("--d-model", f.d_model, "hidden width (= qubits per block)")
        ->capture_default_str();
    cmd.add_option("--layers", f.layers, "ansatz layers")->capture_default_str();
    cmd.add_option("--heads", f.heads, "attention heads")->capture_default_str();
    cmd.add_option("--out", f.out, "output directory");
    cmd.add_flag("-v,--verbose", f.verbosity, "print the loss every epoch");
}

forecast::TrainConfig to_config(const TrainFlags &f, model::ModelKind kind) {
    forecast::TrainConfig c;
    c.model_kind = kind;
    c.quantile = f.quantile;
    c.learning_rate = f.lr;
    c.epochs = f.epochs;
    c.past_steps = f.past_steps;
    c.forecast_steps = f.forecast_steps;
    c.train_range = parse_range(f.data.train_range, "--train-range");
    c.test_range = parse_range(f.test_range, "--test-range");
    c.seed = f.seed;
    c.d_model = f.d_model;
    c.ansatz_layers = f.layers;
    c.heads = f.heads;
    c.min_max_scaling = f.data.scale;
    c.validate();
    if (f.data.features.empty()) {
        throw ConfigError("--features needs at least one column");
    }
    return c;
}

std::vector<std::pair<std::string, std::string>> echo(const TrainFlags &f,
                                                      const forecast::TrainConfig &c) {
    std::string features;
    for (const auto &name : f.data.features) {
        features += (features.empty() ? "" : ",") + name;
    }
    return {
        {"model", std::string(model::to_string(c.model_kind))},
        {"data", f.data.data},
        {"features", features},
        {"target", f.data.target},
        {"epochs", std::to_string(c.epochs)},
        {"lr", io::format_double(c.learning_rate)},
        {"quantile", io::format_double(c.quantile)},
        {"seed", std::to_string(c.seed)},
        {"past_steps", std::to_string(c.past_steps)},
        {"forecast_steps", std::to_string(c.forecast_steps)},
        {"train_range", format_range(c.train_range)},
        {"test_range", format_range(c.test_range)},
        {"d_model", std::to_string(c.d_model)},
        {"layers", std::to_string(c.ansatz_layers)},
        {"heads", std::to_string(c.heads)},
        {"scale", c.min_max_scaling ? "true" : "false"},
    };
}

struct Dataset {
    Eigen::MatrixXd series;
    Eigen::Index target_col = 0;
};

Dataset load_dataset(const DataFlags &d, const forecast::IndexRange &train_range) {
    const auto table = io::load_csv(d.data, d.features, d.target);
    Dataset ds{table.values, table.values.cols() - 1};
    if (d.scale) {
        ds.series = forecast::MinMaxScaler::fit(ds.series, train_range).transform(ds.series);
    }
    return ds;
}

void append_predictions(std::vector<io::PredictionRow> &rows, const std::string &split,
                        const model::ForecastModel &m,
                        const std::vector<forecast::WindowedSample> &samples) {
    const Eigen::MatrixXd pred = forecast::predict(m, samples);
    for (std::size_t w = 0; w < samples.size(); ++w) {
        for (Eigen::Index h = 0; h < pred.cols(); ++h) {
            rows.push_back({split, w, samples[w].anchor + static_cast<std::size_t>(h) + 1,
                            static_cast<std::size_t>(h) + 1, samples[w].targets(h),
                            pred(static_cast<Eigen::Index>(w), h)});
        }
    }
}

struct RunOutcome {
    io::RunReport report;
    fs::path dir;
};

RunOutcome train_one(const TrainFlags &f, const forecast::TrainConfig &c, const fs::path &dir,
                     std::ostream &err) {
    const auto start = Clock::now();
    const Dataset ds = load_dataset(f.data, c.train_range);
    const auto train_set =
        forecast::make_windows(ds.series, ds.target_col, c.past_steps, c.forecast_steps,
                               c.train_range);
    const auto test_set = forecast::make_windows(ds.series, ds.target_col, c.past_steps,
                                                 c.forecast_steps, c.test_range);
    auto m = model::make_model(c.model_config(static_cast<std::size_t>(ds.series.cols() - 1)),
                               c.seed);

    forecast::EpochCallback progress;
    if (f.verbosity > 0) {
        progress = [&err, &c](std::size_t epoch, double loss) {
            err << model::to_string(c.model_kind) << " epoch " << epoch << " loss "
                << io::format_double(loss) << '\n';
        };
    }
    const auto history = forecast::train(*m, train_set, c, progress);

    io::RunReport r;
    r.model = std::string(model::to_string(c.model_kind));
    r.seed = c.seed;
    r.parameter_count = m->num_trainable();
    r.config = echo(f, c);
    r.loss_history = history.loss_history;
    r.sum_history = history.sum_history;
    r.final_train_loss = forecast::evaluate(*m, train_set);
    r.final_test_loss = forecast::evaluate(*m, test_set);
    append_predictions(r.predictions, "train", *m, train_set);
    append_predictions(r.predictions, "test", *m, test_set);
    r.wall_clock_seconds = std::chrono::duration<double>(Clock::now() - start).count();

    io::write_report(r, dir);
    io::save_snapshot(*m, dir / "params.txt");
    return {std::move(r), dir};
}

int cmd_train(const TrainFlags &f, std::ostream &out, std::ostream &err) {
    const auto kind = model::parse_model_kind(f.model);
    const auto c = to_config(f, kind);
    const fs::path dir = f.out.empty() ? default_output(f.model) : fs::path(f.out);
    const auto run = train_one(f, c, dir, err);
    out << "model " << run.report.model << " parameters " << run.report.parameter_count << '\n'
        << "train loss " << io::format_double(run.report.final_train_loss) << '\n'
        << "test loss " << io::format_double(run.report.final_test_loss) << '\n'
        << "report " << (dir / "report.txt").string() << '\n';
    return kExitOk;
}

struct EvalFlags {
    DataFlags data;
    std::string snapshot;
    std::string range = "20:26";
};

int cmd_eval(const EvalFlags &f, std::ostream &out) {
    const auto train_range = parse_range(f.data.train_range, "--train-range");
    const auto range = parse_range(f.range, "--range");
    const auto m = io::load_snapshot(f.snapshot);
    const auto &mc = m->config();
    const Dataset ds = load_dataset(f.data, train_range);
    if (static_cast<std::size_t>(ds.series.cols() - 1) != mc.num_past_vars) {
        throw DataError("snapshot expects " + std::to_string(mc.num_past_vars) +
                        " input columns, data has " + std::to_string(ds.series.cols() - 1));
    }
    const auto samples =
        forecast::make_windows(ds.series, ds.target_col, mc.past_steps, mc.forecast_steps, range);
    out << "windows " << samples.size() << '\n'
        << "loss " << io::format_double(forecast::evaluate(*m, samples)) << '\n';
    return kExitOk;
}

struct Published {
    const char *label;
    model::ModelKind kind;
    double train;
    double test;
    std::size_t parameters;
};

constexpr std::array<Published, 3> kPublished{{
    {"TFT", model::ModelKind::Tft, 0.2630, 0.9856, 190},
    {"QTFT (classical LSTM)", model::ModelKind::Qtft, 0.2028, 0.8381, 158},
    {"QTFT (QLSTM)", model::ModelKind::QtftQlstm, 0.1711, 0.8007, 174},
}};

std::string fixed(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

int cmd_compare(const TrainFlags &f, std::ostream &out, std::ostream &err) {
    std::vector<forecast::TrainConfig> configs;
    for (const auto &p : kPublished) {
        configs.push_back(to_config(f, p.kind));
    }
    const fs::path dir = f.out.empty() ? default_output("compare") : fs::path(f.out);
    std::vector<io::RunReport> runs;
    for (std::size_t i = 0; i < kPublished.size(); ++i) {
        runs.push_back(
            train_one(f, configs[i], dir / std::string(model::to_string(kPublished[i].kind)), err)
                .report);
    }

    fs::create_directories(dir);
    std::ofstream csv(dir / "compare.csv", std::ios::binary | std::ios::trunc);
    csv << "model,train_loss,test_loss,parameters,published_train_loss,published_test_loss,"
           "published_parameters\n";
    char line[256];
    std::snprintf(line, sizeof line, "%-22s %12s %12s %10s %12s %12s %10s\n", "model",
                  "train_loss", "test_loss", "params", "pub_train", "pub_test",
                  "pub_params");
    out << line;
    for (std::size_t i = 0; i < kPublished.size(); ++i) {
        const auto &p = kPublished[i];
        const auto &r = runs[i];
        std::snprintf(line, sizeof line, "%-22s %12s %12s %10zu %12s %12s %10zu\n", p.label,
                      fixed(r.final_train_loss).c_str(), fixed(r.final_test_loss).c_str(),
                      r.parameter_count, fixed(p.train).c_str(), fixed(p.test).c_str(),
                      p.parameters);
        out << line;
        csv << model::to_string(p.kind) << ',' << io::format_double(r.final_train_loss) << ','
            << io::format_double(r.final_test_loss) << ',' << r.parameter_count << ','
            << fixed(p.train) << ',' << fixed(p.test) << ',' << p.parameters << '\n';
    }
    if (!csv) {
        throw Error("cannot write '" + (dir / "compare.csv").string() + "'");
    }
    return kExitOk;
}

struct GradFlags {
    std::uint64_t seed = 7;
    double fault = 0.0;
    bool blocks_only = false;
};

int cmd_gradcheck(const GradFlags &f, std::ostream &out) {
    const auto start = Clock::now();
    diagnostics::SuiteOptions o;
    o.seed = f.seed;
    o.check.oracle_offset = f.fault;
    o.include_models = !f.blocks_only;
    const auto checks = diagnostics::run_gradient_suite(o);
    bool ok = true;
    char line[256];
    std::snprintf(line, sizeof line, "%-22s %8s %14s %14s %9s  %s\n", "block", "entries",
                  "max_abs_dev", "max_rel_dev", "seconds", "status");
    out << line;
    for (const auto &c : checks) {
        ok = ok && c.result.passed();
        std::snprintf(line, sizeof line, "%-22s %8zu %14.3e %14.3e %9.3f  %s\n", c.block.c_str(),
                      c.result.checked, c.result.max_abs_error, c.result.max_rel_error,
                      c.seconds, c.result.passed() ? "ok" : "FAIL");
        out << line;
    }
    out << "runtime " << fixed(std::chrono::duration<double>(Clock::now() - start).count(), 3)
        << " s\n";
    return ok ? kExitOk : kExitRuntime;
}

} // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Temporal fusion transformer forecasting, classical and quantum", "qtft"};
    app.require_subcommand(1);

    TrainFlags train_flags;
    auto *train = app.add_subcommand("train", "train one model and write a run report");
    add_train_flags(*train, train_flags, true);

    EvalFlags eval_flags;
    auto *eval = app.add_subcommand("eval", "evaluate a saved parameter snapshot");
    add_data_flags(*eval, eval_flags.data);
    eval->add_option("--snapshot", eval_flags.snapshot, "params.txt written by train")
        ->required();
    eval->add_option("--range", eval_flags.range, "rows FIRST:LAST (inclusive)")
        ->capture_default_str();

    TrainFlags compare_flags;
    auto *compare =
        app.add_subcommand("compare", "train tft, qtft and qtft-qlstm under one configuration");
    add_train_flags(*compare, compare_flags, false);

    GradFlags grad_flags;
    auto *grad = app.add_subcommand("gradcheck", "finite-difference checks of every block");
    grad->add_option("--seed", grad_flags.seed)->capture_default_str();
    grad->add_option("--fault-offset", grad_flags.fault,
                     "perturb parameters on the finite-difference side (fault injection)")
        ->capture_default_str();
    grad->add_flag("--blocks-only", grad_flags.blocks_only, "skip the end-to-end model checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (train->parsed()) {
            return cmd_train(train_flags, out, err);
        }
        if (eval->parsed()) {
            return cmd_eval(eval_flags, out);
        }
        if (compare->parsed()) {
            return cmd_compare(compare_flags, out, err);
        }
        return cmd_gradcheck(grad_flags, out);
    } catch (const ConfigError &e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

} // namespace qtft::cli
