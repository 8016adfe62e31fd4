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
#include "qtft/io/csv.hpp"

#include "qtft/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_map>

namespace qtft::io {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::ranges::transform(out, out.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

} // namespace

std::string canonical_column_name(std::string_view header) {
    static const std::unordered_map<std::string, std::string> synonyms{
        {"previous close", "prev close"},
        {"deliverable percent", "%deliverble"},
        {"%deliverable", "%deliverble"},
    };
    std::string name = lower(trim(header));
    if (!name.empty() && name.front() == '\xef') {
        // UTF-8 byte order mark on the first header cell.
        name = name.substr(std::min<std::size_t>(3, name.size()));
    }
    if (const auto it = synonyms.find(name); it != synonyms.end()) {
        return it->second;
    }
    return name;
}

std::vector<std::string> split_csv_line(std::string_view line) {
    if (!line.empty() && line.back() == '\r') {
        line.remove_suffix(1);
    }
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur.push_back('"');
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cur.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

bool parse_double(std::string_view text, double &out) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    if (text.empty()) {
        return false;
    }
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size() && std::isfinite(out);
}

std::string format_double(double v) {
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
    return {buf, static_cast<std::size_t>(n)};
}

Eigen::Index TimeSeriesTable::column(std::string_view name) const {
    const std::string key = canonical_column_name(name);
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (canonical_column_name(columns[i]) == key) {
            return static_cast<Eigen::Index>(i);
        }
    }
    throw DataError("no column '" + std::string(name) + "'");
}

TimeSeriesTable load_csv(const std::filesystem::path &path,
                         const std::vector<std::string> &feature_columns,
                         const std::string &target_column) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open '" + path.string() + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("'" + path.string() + "' is empty");
    }
    const auto header = split_csv_line(line);
    auto find = [&](const std::string &name) -> std::ptrdiff_t {
        const std::string key = canonical_column_name(name);
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (canonical_column_name(header[i]) == key) {
                return static_cast<std::ptrdiff_t>(i);
            }
        }
        return -1;
    };

    TimeSeriesTable table;
    std::vector<std::size_t> source;
    std::vector<std::string> wanted = feature_columns;
    wanted.push_back(target_column);
    for (const auto &name : wanted) {
        const auto idx = find(name);
        if (idx < 0) {
            throw DataError("missing column '" + name + "' in '" + path.string() + "'");
        }
        source.push_back(static_cast<std::size_t>(idx));
        table.columns.push_back(std::string(trim(header[static_cast<std::size_t>(idx)])));
    }
    const auto date_idx = find("date");

    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split_csv_line(line);
        std::vector<double> row(source.size());
        for (std::size_t j = 0; j < source.size(); ++j) {
            if (source[j] >= fields.size() || !parse_double(fields[source[j]], row[j])) {
                const std::string cell = source[j] < fields.size() ? fields[source[j]] : "";
                throw DataError(path.string() + ":" + std::to_string(line_no) + ": column '" +
                                table.columns[j] + "': cannot parse '" + cell + "'");
            }
        }
        rows.push_back(std::move(row));
        table.dates.emplace_back(date_idx >= 0 &&
                                         static_cast<std::size_t>(date_idx) < fields.size()
                                     ? std::string(trim(fields[static_cast<std::size_t>(date_idx)]))
                                     : std::string());
    }
    table.values.resize(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(source.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < source.size(); ++j) {
            table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return table;
}

} // namespace qtft::io
