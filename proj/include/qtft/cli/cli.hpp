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
 * The `qtft` command line: train, eval, compare and gradcheck.
 *
 * Exit codes: 0 success, 1 runtime failure, 2 invalid flags (nothing is
 * computed). QTFT_OUTPUT_DIR sets the default output directory.
 */
#pragma once

#include <iosfwd>

namespace qtft::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

inline constexpr const char *kOutputDirEnv = "QTFT_OUTPUT_DIR";

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace qtft::cli
