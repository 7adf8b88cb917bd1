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


#include "doctest.h"
#include "nsmimo/errors.hpp"
#include "nsmimo/io.hpp"

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

using namespace nsmimo;
using cd = std::complex<double>;

namespace
{
    std::vector<std::string> lines(const std::string &text)
    {
        std::vector<std::string> out;
        std::istringstream in(text);
        for (std::string l; std::getline(in, l);)
            out.push_back(l);
        return out;
    }

    std::string first_data_row(const std::string &text, std::string *header = nullptr)
    {
        auto ls = lines(text);
        std::size_t i = 0;
        while (i < ls.size() && ls[i].rfind("#", 0) == 0)
            ++i;
        if (header)
            *header = ls.at(i);
        return ls.at(i + 1);
    }

    std::string config_error_key(const json &j)
    {
        try
        {
            config_from_json(j);
        }
        catch (const ConfigError &e)
        {
            return e.key_path();
        }
        return "<no error>";
    }
}

TEST_CASE("config: minimal document gives the defaults")
{
    auto cfg = config_from_json(json{{"carrier_frequency", 2.6e9}});
    CHECK(cfg == ScenarioConfig{});
}

TEST_CASE("config: round trip through JSON keeps every field")
{
    ScenarioConfig c;
    c.seed = 77;
    c.d_tr = 120.0;
    c.num_clusters = 7;
    c.rays_per_cluster = 11;
    c.power_model = PowerModel::winner;
    c.shadow_sigma = 4.0;
    c.shadow_sigma_units = SigmaUnits::db;
    c.tx_array = ArraySpec(64, 0.03, 1.2);
    c.time_samples = 64;
    c.time_step = 1e-4;
    auto back = config_from_json(config_to_json(c));
    CHECK(back == c);
    CHECK(config_hash(back) == config_hash(c));

    auto dir = std::filesystem::temp_directory_path() / "nsmimo_io_test";
    std::filesystem::create_directories(dir);
    save_config(c, dir / "c.json");
    CHECK(load_config(dir / "c.json") == c);
    CHECK_FALSE(std::filesystem::exists(dir / "c.json.partial"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("config: spacing in wavelengths")
{
    auto cfg = config_from_json(json{{"carrier_frequency", 3.5e9}, {"tx_array", {{"spacing_wavelengths", 1.0}}}});
    CHECK(cfg.tx_array.spacing == doctest::Approx(speed_of_light / 3.5e9));
    CHECK(cfg.rx_array.spacing == doctest::Approx(0.5 * speed_of_light / 3.5e9));
    CHECK(config_error_key(json{{"carrier_frequency", 3.5e9},
                                {"tx_array", {{"spacing", 0.05}, {"spacing_wavelengths", 1.0}}}}) == "tx_array.spacing");
}

TEST_CASE("config: errors name the offending key")
{
    CHECK(config_error_key(json::object()) == "carrier_frequency");
    CHECK(config_error_key(json{{"carrier_frequency", "fast"}}) == "carrier_frequency");
    CHECK(config_error_key(json{{"carrier_frequency", 2.6e9}, {"colour", 1}}) == "colour");
    CHECK(config_error_key(json{{"carrier_frequency", 2.6e9}, {"clusters", {{"cout", 3}}}}) == "clusters.cout");
    CHECK(config_error_key(json{{"carrier_frequency", 2.6e9}, {"clusters", {{"count", 2.5}}}}) == "clusters.count");
    CHECK(config_error_key(json{{"carrier_frequency", 2.6e9}, {"clusters", {{"power_model", "x"}}}}) ==
          "clusters.power_model");
    CHECK(config_error_key(json{{"carrier_frequency", 2.6e9}, {"time", 5}}) == "time");
    CHECK(config_error_key(json{{"carrier_frequency", 2.6e9}, {"schema_version", 2}}) == "schema_version");
    CHECK(config_error_key(json{{"carrier_frequency", 2.6e9}, {"link", {{"d_tr", -1.0}}}}) == "link.d_tr");
    CHECK(config_error_key(json{{"carrier_frequency", 2.6e9}, {"seed", -4}}) == "seed");

    try
    {
        config_from_json(json::object());
        FAIL("expected ConfigError");
    }
    catch (const ConfigError &e)
    {
        CHECK(std::string(e.what()).find("carrier_frequency") != std::string::npos);
    }
}

TEST_CASE("config: hash is stable and sensitive")
{
    ScenarioConfig a;
    const auto h = config_hash(a);
    CHECK(h.size() == 16);
    CHECK(h.find_first_not_of("0123456789abcdef") == std::string::npos);
    CHECK(config_hash(a) == h);
    a.seed = 2;
    CHECK(config_hash(a) != h);
}

TEST_CASE("tensor: round trip in both precisions")
{
    std::vector<std::size_t> shape{2, 3};
    std::vector<cd> data{{1, -2}, {0.1, 0.2}, {1e-30, -1e30}, {0, 0}, {-0.0, 3.25}, {1.0 / 3, 2.0 / 3}};
    json hdr{{"note", "x"}};

    auto d128 = decode_tensor(encode_tensor(hdr, shape, data, TensorPrecision::complex128));
    CHECK(d128.shape == shape);
    CHECK(d128.header["note"] == "x");
    CHECK(d128.header["dtype"] == "complex128");
    for (std::size_t i = 0; i < data.size(); ++i)
        CHECK(d128.data[i] == data[i]);

    auto d64 = decode_tensor(encode_tensor(hdr, shape, data, TensorPrecision::complex64));
    CHECK(d64.header["dtype"] == "complex64");
    for (std::size_t i = 0; i < data.size(); ++i)
    {
        CHECK(d64.data[i].real() == double(float(data[i].real())));
        CHECK(d64.data[i].imag() == double(float(data[i].imag())));
    }
}

TEST_CASE("tensor: byte layout is little endian")
{
    std::vector<std::size_t> shape{1};
    std::vector<cd> data{{1.0, -2.0}};
    auto bytes = encode_tensor(json::object(), shape, data, TensorPrecision::complex64);
    CHECK(bytes.substr(0, 8) == std::string(tensor_magic, 8));
    std::uint64_t hlen = 0;
    for (int i = 7; i >= 0; --i)
        hlen = (hlen << 8) | std::uint8_t(bytes[8 + i]);
    REQUIRE(bytes.size() == 16 + hlen + 8);
    auto payload = bytes.substr(16 + hlen);
    // 1.0f = 0x3f800000, -2.0f = 0xc0000000
    CHECK(std::uint8_t(payload[0]) == 0x00);
    CHECK(std::uint8_t(payload[3]) == 0x3f);
    CHECK(std::uint8_t(payload[2]) == 0x80);
    CHECK(std::uint8_t(payload[7]) == 0xc0);
}

TEST_CASE("tensor: corrupt input is rejected")
{
    std::vector<std::size_t> shape{2};
    std::vector<cd> data{{1, 2}, {3, 4}};
    auto bytes = encode_tensor(json::object(), shape, data, TensorPrecision::complex128);
    auto bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS(decode_tensor(bad));
    CHECK_THROWS(decode_tensor(bytes.substr(0, bytes.size() - 1)));
    CHECK_THROWS(decode_tensor("short"));
    std::vector<std::size_t> wrong{3};
    CHECK_THROWS_AS(encode_tensor(json::object(), wrong, data, TensorPrecision::complex64), std::invalid_argument);
}

TEST_CASE("tensor: realization file carries the metadata")
{
    ScenarioConfig c;
    c.tx_array = ArraySpec(4, c.tx_array.spacing, c.tx_array.tilt);
    c.rx_array = ArraySpec(2, c.rx_array.spacing, c.rx_array.tilt);
    c.num_clusters = 3;
    c.time_samples = 5;
    auto s = build_scenario(c);
    auto r = synthesize(s, TimeGrid::for_config(c), 9);
    auto path = std::filesystem::temp_directory_path() / "nsmimo_io_tensor.nst";
    write_realization(path, r, config_hash(c), TensorPrecision::complex128);
    auto t = read_tensor(path);
    std::filesystem::remove(path);
    CHECK(t.shape == std::vector<std::size_t>{2, 4, 4, 5});
    CHECK(t.header["config_hash"] == config_hash(c));
    CHECK(t.header["track_seed"] == 9);
    CHECK(t.header["delays"].size() == 4);
    CHECK(t.header["axes"][2] == "tap");
    for (std::size_t i = 0; i < t.data.size(); ++i)
        CHECK(t.data[i] == r.gains.data()[i]);
}

TEST_CASE("csv: number formatting")
{
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-2.0) == "-2");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(format_double(std::nan("")) == "nan");
    const double x = 1.0 / 3.0;
    CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("csv: series columns and preamble")
{
    StatSeries s;
    s.name = "kfactor";
    s.label = "sigma_db=4";
    s.axis = "antenna";
    s.unit = "index";
    s.grid = {1, 2};
    s.values = {cd(3.0, 0.0), cd(std::numeric_limits<double>::infinity(), 0.0)};
    s.infinite = {0, 1};
    s.tap = 3;
    std::vector<StatSeries> v{s};
    CsvMeta meta;
    meta.kind = "kfactor";
    meta.seed = 5;
    meta.config_hash = "abc";
    auto text = series_csv(v, meta);
    CHECK(text.rfind("# schema_version: 1\n# kind: kfactor\n", 0) == 0);
    CHECK(text.find("# seed: 5\n") != std::string::npos);
    CHECK(text.find("# config_hash: abc\n") != std::string::npos);
    std::string header;
    CHECK(first_data_row(text, &header) == "sigma_db=4,analytic,3,0,1,3,0,3,,0");
    CHECK(header == "label,estimator,tap,anchor,antenna_index,real,imag,abs,std_error,infinite");
    CHECK(text.find(",inf,0,inf,,1\n") != std::string::npos);
}

TEST_CASE("csv: aps and evolution layouts")
{
    ApsResult aps;
    aps.window_starts = {1, 2};
    aps.angles = {pi / 2, pi / 4};
    aps.spectrum_db = {0.0, -3.0, -1.0, -2.0};
    CsvMeta meta;
    meta.kind = "aps";
    std::string header;
    auto text = aps_csv(aps, meta);
    CHECK(first_data_row(text, &header) == "1,90,0");
    CHECK(header == "window_start,angle_deg,power_db");
    CHECK(text.find("\n2,45,-2\n") != std::string::npos);

    ScenarioConfig c;
    c.tx_array = ArraySpec(3, c.tx_array.spacing, c.tx_array.tilt);
    c.num_clusters = 2;
    auto s = build_scenario(c);
    LargeScaleSet tracks = unit_tracks(s);
    tracks.clusters[0].visible[1] = 0;
    meta.kind = "evolution";
    auto ev = evolution_csv(s, tracks, meta);
    CHECK(first_data_row(ev, &header) == "0,1,1,0");
    CHECK(header == "cluster,antenna,visible,power_db");
    CHECK(ev.find("\n1,2,0,-inf\n") != std::string::npos);
    CHECK(lines(ev).size() == 6 + 1 + 9);
}
