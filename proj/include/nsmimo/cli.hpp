// SPDX-License-Identifier: Apache-2.0
//
// nsmimo: non-stationary massive MIMO channel simulation library
// Copyright (C) 2026 The nsmimo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#ifndef nsmimo_cli_H
#define nsmimo_cli_H

#include "nsmimo/io.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace nsmimo
{
    inline constexpr const char *library_version = "0.1.0";

    // Everything a command needs besides the scenario config; recorded in the run manifest
    struct CommandOptions
    {
        std::string command;                    // generate, stats, aps, evolve
        std::string kind;                       // stats only: acf, ccf, power, kfactor
        std::filesystem::path config_path;      // Empty = built-in defaults
        std::filesystem::path out_dir = "out";
        bool has_seed = false;
        std::uint64_t seed = 1;                 // Overrides the config seed when has_seed
        std::size_t runs = 10000;
        int jobs = 1;
        int tap = -1;                           // -1 = every tap (APS: composite)
        std::vector<int> ref_antennas{1, 64, 128};
        std::vector<double> sigma_db;           // Empty = configured shadow sigma
        int window = 12;
        int step = 1;
        bool empirical = false;
        bool all_visible = false;
        int tx_antenna = 1;
        int rx_antenna = 1;
        int lags = 64;                          // ACF lag samples 0 .. lags - 1
        int max_spacing = 20;                   // CCF antenna spacings 0 .. max_spacing
        double time = 0.0;                      // CCF evaluation time [s]
        int snapshots = 0;                      // APS time samples, 0 = all
        int sources = -1;                       // APS signal subspace size, -1 = auto
        std::string precision = "complex64";    // generate tensor payload

        json to_json() const;
        static CommandOptions from_json(const json &j);
    };

    // Runs one command with an already loaded config and returns the artifact file names, relative to out_dir.
    // Writes manifest.json last. Removes the artifacts of this run if anything fails.
    std::vector<std::string> run_command(const CommandOptions &options, const ScenarioConfig &config);

    // Full front end: argument parsing, config loading, error reporting. Returns the process exit code:
    // 0 ok, 2 usage or config error, 3 runtime error.
    int run_cli(int argc, const char *const *argv);
}

#endif
