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
 * Run artifacts. A run directory holds
 *
 *   report.txt       key=value header, then [loss] and [predictions] CSV blocks
 *   loss.csv         epoch,mean_loss,sum_loss
 *   predictions.csv  split,window,time_index,horizon,true,predicted
 *   timing.txt       wall_clock_seconds=...
 *
 * Wall-clock time lives only in timing.txt so that report.txt is identical
 * across reruns with the same flags. Reals are written with %.17g.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace qtft::io {

struct PredictionRow {
    std::string split; // "train" or "test"
    std::size_t window = 0;
    std::size_t time_index = 0; // series row of the target
    std::size_t horizon = 1;    // 1-based
    double truth = 0.0;
    double predicted = 0.0;

    bool operator==(const PredictionRow &) const = default;
};

struct RunReport {
    std::string model;
    std::uint64_t seed = 0;
    std::size_t parameter_count = 0;
    std::vector<std::pair<std::string, std::string>> config; // effective flags, in order
    std::vector<double> loss_history;
    std::vector<double> sum_history;
    double final_train_loss = 0.0;
    double final_test_loss = 0.0;
    std::vector<PredictionRow> predictions;
    double wall_clock_seconds = 0.0;
};

void write_prediction_table(std::ostream &out, const std::vector<PredictionRow> &rows);
/// Reads a table written by write_prediction_table; throws DataError.
[[nodiscard]] std::vector<PredictionRow> read_prediction_table(std::istream &in);

/// Creates `dir` if needed and writes the four files. Throws Error on I/O failure.
void write_report(const RunReport &report, const std::filesystem::path &dir);

/// Reads report.txt (and timing.txt when present) back from `dir`.
[[nodiscard]] RunReport read_report(const std::filesystem::path &dir);

} // namespace qtft::io
