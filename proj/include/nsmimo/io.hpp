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


#ifndef nsmimo_io_H
#define nsmimo_io_H

#include "nsmimo/channel.hpp"
#include "nsmimo/doa.hpp"
#include "nsmimo/scenario.hpp"
#include "nsmimo/stats.hpp"

#include <complex>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace nsmimo
{
    using json = nlohmann::ordered_json;

    inline constexpr int csv_schema_version = 1;
    inline constexpr int tensor_format_version = 1;

    // ------------------------------------------------------------------ config

    // Schema (version 1), all angles in radians, lengths in meters:
    //   schema_version, carrier_frequency (required), seed,
    //   tx_array / rx_array {num_elements, spacing | spacing_wavelengths, tilt},
    //   link {d_tr, los_aod, los_aoa}, motion {speed, heading},
    //   clusters {count, rays, delay_ratio, delay_spread, cluster_asd, composite_asd, range_mean, range_min,
    //             power_model: massive_mimo | winner, winner_shadow_std_db},
    //   large_scale {shadow_sigma, shadow_sigma_units: db | natural, decorr_distance, los_shadow_sigma,
    //                los_area_mean_db, markov_rate_strong, markov_rate_weak, los_markov_rate, area_mean_coupling},
    //   time {samples, step}
    // Unknown keys and wrong types raise ConfigError with the dotted key path.
    ScenarioConfig config_from_json(const json &j);
    json config_to_json(const ScenarioConfig &config);
    ScenarioConfig load_config(const std::filesystem::path &path);
    void save_config(const ScenarioConfig &config, const std::filesystem::path &path);

    // FNV-1a 64 of the canonical JSON form, as 16 hex digits
    std::string config_hash(const ScenarioConfig &config);

    // ------------------------------------------------------------------ files

    // Write to a sibling temporary file, then rename over the target
    void atomic_write(const std::filesystem::path &path, const std::string &bytes);
    std::string read_file(const std::filesystem::path &path);

    // ------------------------------------------------------------------ tensor container
    //
    //   bytes 0..7    magic "NSMIMOT\x01"
    //   bytes 8..15   header length H, unsigned 64-bit little endian
    //   next H bytes  UTF-8 JSON header: format, version, dtype (complex64 | complex128), shape, axes, delays,
    //                 time {start, step, count}, tx_indices, rx_indices, wavelength, scenario_seed, track_seed,
    //                 config_hash
    //   payload       row-major (last axis fastest), interleaved real / imaginary, little endian IEEE-754

    inline constexpr char tensor_magic[8] = {'N', 'S', 'M', 'I', 'M', 'O', 'T', '\x01'};

    enum class TensorPrecision
    {
        complex64,
        complex128
    };

    struct TensorFile
    {
        json header;
        std::vector<std::size_t> shape;
        std::vector<std::complex<double>> data;
    };

    std::string encode_tensor(const json &header, std::span<const std::size_t> shape,
                              std::span<const std::complex<double>> data, TensorPrecision precision);
    TensorFile decode_tensor(const std::string &bytes);

    json realization_header(const ChannelRealization &r, const std::string &config_hash);
    void write_realization(const std::filesystem::path &path, const ChannelRealization &r,
                           const std::string &config_hash, TensorPrecision precision = TensorPrecision::complex64);
    TensorFile read_tensor(const std::filesystem::path &path);

    // ------------------------------------------------------------------ CSV
    //
    // Every CSV starts with '#'-prefixed "key: value" lines (schema_version, kind, estimator, samples, seed,
    // config_hash, plus command-specific entries), followed by one header row of column names.

    struct CsvMeta
    {
        std::string kind;
        std::string estimator = "n/a";
        std::size_t samples = 0;
        std::uint64_t seed = 0;
        std::string config_hash;
        std::vector<std::pair<std::string, std::string>> extra;
    };

    std::string csv_preamble(const CsvMeta &meta);

    // Columns: label, estimator, tap, anchor, <axis>, real, imag, abs, std_error, infinite
    std::string series_csv(std::span<const StatSeries> series, const CsvMeta &meta);

    // Columns: window_start, angle_deg, power_db
    std::string aps_csv(const ApsResult &aps, const CsvMeta &meta);

    // Columns: cluster (0 = LOS), antenna, visible, power_db with power = P_c xi^2 Pi^2 (-inf if invisible)
    std::string evolution_csv(const Scenario &scenario, const LargeScaleSet &tracks, const CsvMeta &meta);

    std::string format_double(double v); // Shortest round-trip representation, inf / -inf / nan spelled out
}

#endif
