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
 * CSV ingestion for daily stock tables.
 */
#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace qtft::io {

struct TimeSeriesTable {
    std::vector<std::string> dates;   // empty strings when the file has no Date column
    std::vector<std::string> columns; // requested features, then the target
    Eigen::MatrixXd values;           // rows x columns

    [[nodiscard]] Eigen::Index rows() const noexcept { return values.rows(); }
    /// Position of a column by case-insensitive name; throws DataError.
    [[nodiscard]] Eigen::Index column(std::string_view name) const;
};

/// Lower-cased, trimmed header with synonyms folded onto one spelling, e.g.
/// "Previous Close" -> "prev close", "Deliverable Percent" -> "%deliverble".
[[nodiscard]] std::string canonical_column_name(std::string_view header);

/// Splits one CSV record. Double-quoted fields may contain commas and "" escapes.
[[nodiscard]] std::vector<std::string> split_csv_line(std::string_view line);

/// Reads the date column plus the requested columns, in the order given with
/// the target last. Throws DataError for a missing file, a missing column
/// (naming it) or a cell that is not a finite number (naming the line).
[[nodiscard]] TimeSeriesTable load_csv(const std::filesystem::path &path,
                                       const std::vector<std::string> &feature_columns,
                                       const std::string &target_column);

/// Parses a finite double, returning false on any trailing garbage.
[[nodiscard]] bool parse_double(std::string_view text, double &out);

/// Shortest-round-trip text for a double ("%.17g").
[[nodiscard]] std::string format_double(double v);

} // namespace qtft::io
