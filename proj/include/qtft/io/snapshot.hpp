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
 * Plain-text parameter snapshots:
 *
 *   qtft-parameters 1
 *   <key>=<value>            model configuration, one per line
 *   end-config
 *   param <name> <rows> <cols>
 *   <rows * cols reals, column-major, space separated>
 *   ...
 */
#pragma once

#include "qtft/model/fusion.hpp"

#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace qtft::io {

[[nodiscard]] std::vector<std::pair<std::string, std::string>>
model_config_entries(const model::ModelConfig &cfg);

/// Inverse of model_config_entries; unknown keys throw DataError.
[[nodiscard]] model::ModelConfig
model_config_from_entries(const std::vector<std::pair<std::string, std::string>> &entries);

void save_snapshot(const model::ForecastModel &model, const std::filesystem::path &path);

/// Rebuilds the model from the stored configuration and overwrites every
/// parameter. Throws DataError on a missing file, unknown or missing
/// parameters and shape mismatches.
[[nodiscard]] std::unique_ptr<model::ForecastModel>
load_snapshot(const std::filesystem::path &path);

} // namespace qtft::io
