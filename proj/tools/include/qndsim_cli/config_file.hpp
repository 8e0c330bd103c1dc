// Copyright 2026 The qndsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace qndsim::cli {

/// Flat `key = value` document whose keys are long flag names. Blank lines
/// and `#` comments are ignored.
std::vector<std::pair<std::string, std::string>> read_config_file(
    const std::filesystem::path& path);

struct ExpandedArgs {
  std::vector<std::string> args;
  std::string config_path;  // empty when no --config was given
};

/// Rewrites a subcommand's arguments so that a `--config FILE` entry is
/// replaced by the file's settings placed in front of the remaining flags.
/// Later occurrences win during parsing, so explicit flags override the file.
/// A value of `true` becomes a bare switch and `false` drops the key.
ExpandedArgs expand_config(const std::vector<std::string>& args);

}  // namespace qndsim::cli
