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


#include "nsmimo/io.hpp"
#include "nsmimo/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

namespace
{
    using nsmimo::ConfigError;
    using nsmimo::json;

    // Reads the members of one JSON object and remembers which keys were used
    class ObjectReader
    {
    public:
        ObjectReader(const json &j, std::string path) : j_(j), path_(std::move(path))
        {
            if (!j_.is_object())
                throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
        }

        std::string key(const std::string &name) const { return path_.empty() ? name : path_ + "." + name; }
        bool has(const std::string &name) const { return j_.contains(name); }

        const json *get(const std::string &name)
        {
            used_.insert(name);
            auto it = j_.find(name);
            return it == j_.end() ? nullptr : &*it;
        }

        void number(const std::string &name, double &out)
        {
            if (const json *v = get(name))
            {
                if (!v->is_number())
                    throw ConfigError(key(name), "expected a number");
                out = v->get<double>();
                if (!std::isfinite(out))
                    throw ConfigError(key(name), "must be finite");
            }
        }

        void integer(const std::string &name, int &out)
        {
            if (const json *v = get(name))
            {
                if (!v->is_number_integer())
                    throw ConfigError(key(name), "expected an integer");
                auto x = v->get<std::int64_t>();
                if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
                    throw ConfigError(key(name), "integer out of range");
                out = int(x);
            }
        }

        void unsigned_integer(const std::string &name, std::uint64_t &out)
        {
            if (const json *v = get(name))
            {
                if (!v->is_number_unsigned())
                    throw ConfigError(key(name), "expected a non-negative integer");
                out = v->get<std::uint64_t>();
            }
        }

        std::string string(const std::string &name, const std::string &fallback)
        {
            if (const json *v = get(name))
            {
                if (!v->is_string())
                    throw ConfigError(key(name), "expected a string");
                return v->get<std::string>();
            }
            return fallback;
        }

        ObjectReader child(const std::string &name)
        {
            static const json empty = json::object();
            const json *v = get(name);
            return ObjectReader(v ? *v : empty, key(name));
        }

        void finish() const
        {
            for (auto it = j_.begin(); it != j_.end(); ++it)
                if (!used_.count(it.key()))
                    throw ConfigError(key(it.key()), "unknown key");
        }

    private:
        const json &j_;
        std::string path_;
        std::set<std::string> used_;
    };

    nsmimo::ArraySpec read_array(ObjectReader r, const nsmimo::ArraySpec &fallback, double wavelength)
    {
        int n = fallback.num_elements;
        double tilt = fallback.tilt;
        double spacing = 0.5 * wavelength;
        r.integer("num_elements", n);
        r.number("tilt", tilt);
        if (r.has("spacing") && r.has("spacing_wavelengths"))
            throw ConfigError(r.key("spacing"), "give either spacing or spacing_wavelengths, not both");
        if (r.has("spacing"))
            r.number("spacing", spacing);
        else if (r.has("spacing_wavelengths"))
        {
            double w = 0.0;
            r.number("spacing_wavelengths", w);
            spacing = w * wavelength;
        }
        r.finish();
        if (n < 1)
            throw ConfigError(r.key("num_elements"), "must be at least 1");
        if (!(spacing > 0.0))
            throw ConfigError(r.key("spacing"), "must be positive");
        return nsmimo::ArraySpec(n, spacing, tilt);
    }

    json array_json(const nsmimo::ArraySpec &a)
    {
        return json{{"num_elements", a.num_elements}, {"spacing", a.spacing}, {"tilt", a.tilt}};
    }

    void put_u64(std::string &out, std::uint64_t v)
    {
        for (int i = 0; i < 8; ++i)
            out.push_back(char((v >> (8 * i)) & 0xff));
    }

    std::uint64_t get_u64(const unsigned char *p)
    {
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i)
            v = (v << 8) | p[i];
        return v;
    }

    template <typename UInt, typename Float>
    void put_float(std::string &out, Float f)
    {
        UInt bits;
        std::memcpy(&bits, &f, sizeof bits);
        for (std::size_t i = 0; i < sizeof bits; ++i)
            out.push_back(char((bits >> (8 * i)) & 0xff));
    }

    template <typename UInt, typename Float>
    Float get_float(const unsigned char *p)
    {
        UInt bits = 0;
        for (int i = int(sizeof bits) - 1; i >= 0; --i)
            bits = UInt((bits << 8) | p[i]);
        Float f;
        std::memcpy(&f, &bits, sizeof f);
        return f;
    }
}

nsmimo::ScenarioConfig nsmimo::config_from_json(const json &j)
{
    ScenarioConfig cfg;
    ObjectReader root(j, "");

    root.integer("schema_version", cfg.schema_version);
    if (cfg.schema_version != 1)
        throw ConfigError("schema_version", "unsupported schema version " + std::to_string(cfg.schema_version) +
                                                " (expected 1)");
    if (!root.has("carrier_frequency"))
        throw ConfigError("carrier_frequency", "required key missing (expected a number in Hz)");
    root.number("carrier_frequency", cfg.carrier_frequency);
    if (!(cfg.carrier_frequency > 0.0))
        throw ConfigError("carrier_frequency", "must be positive");
    root.unsigned_integer("seed", cfg.seed);

    const double lambda = cfg.wavelength();
    cfg.tx_array = read_array(root.child("tx_array"), ArraySpec(128, 0.0, pi / 2), lambda);
    cfg.rx_array = read_array(root.child("rx_array"), ArraySpec(10, 0.0, pi / 4), lambda);

    {
        auto link = root.child("link");
        link.number("d_tr", cfg.d_tr);
        link.number("los_aod", cfg.los_aod);
        double aoa = wrap_angle(cfg.los_aod + pi); // Default: MS faces the BS
        link.number("los_aoa", aoa);
        cfg.los_aoa = wrap_angle(aoa);
        cfg.los_aod = wrap_angle(cfg.los_aod);
        link.finish();
    }
    {
        auto motion = root.child("motion");
        double speed = cfg.motion.speed, heading = cfg.motion.heading;
        motion.number("speed", speed);
        motion.number("heading", heading);
        motion.finish();
        if (!(speed >= 0.0))
            throw ConfigError("motion.speed", "cannot be negative");
        cfg.motion = Motion(speed, heading);
    }
    {
        auto c = root.child("clusters");
        c.integer("count", cfg.num_clusters);
        c.integer("rays", cfg.rays_per_cluster);
        c.number("delay_ratio", cfg.delay_ratio);
        c.number("delay_spread", cfg.delay_spread);
        c.number("cluster_asd", cfg.cluster_asd);
        c.number("composite_asd", cfg.composite_asd);
        c.number("range_mean", cfg.cluster_range_mean);
        c.number("range_min", cfg.cluster_range_min);
        std::string model = c.string("power_model", "massive_mimo");
        if (model == "massive_mimo")
            cfg.power_model = PowerModel::massive_mimo;
        else if (model == "winner")
            cfg.power_model = PowerModel::winner;
        else
            throw ConfigError("clusters.power_model", "expected \"massive_mimo\" or \"winner\", got \"" + model + "\"");
        c.number("winner_shadow_std_db", cfg.winner_shadow_std_db);
        c.finish();
    }
    {
        auto ls = root.child("large_scale");
        ls.number("shadow_sigma", cfg.shadow_sigma);
        std::string units = ls.string("shadow_sigma_units", "natural");
        if (units == "db")
            cfg.shadow_sigma_units = SigmaUnits::db;
        else if (units == "natural")
            cfg.shadow_sigma_units = SigmaUnits::natural;
        else
            throw ConfigError("large_scale.shadow_sigma_units", "expected \"db\" or \"natural\", got \"" + units + "\"");
        ls.number("decorr_distance", cfg.shadow_decorr);
        ls.number("los_shadow_sigma", cfg.los_shadow_sigma);
        ls.number("los_area_mean_db", cfg.los_area_mean_db);
        ls.number("markov_rate_strong", cfg.markov_rate_strong);
        ls.number("markov_rate_weak", cfg.markov_rate_weak);
        ls.number("los_markov_rate", cfg.los_markov_rate);
        ls.number("area_mean_coupling", cfg.area_mean_coupling);
        ls.finish();
    }
    {
        auto t = root.child("time");
        t.integer("samples", cfg.time_samples);
        t.number("step", cfg.time_step);
        t.finish();
    }
    root.finish();
    cfg.validate();
    return cfg;
}

nsmimo::json nsmimo::config_to_json(const ScenarioConfig &c)
{
    return json{
        {"schema_version", c.schema_version},
        {"carrier_frequency", c.carrier_frequency},
        {"seed", c.seed},
        {"tx_array", array_json(c.tx_array)},
        {"rx_array", array_json(c.rx_array)},
        {"link", {{"d_tr", c.d_tr}, {"los_aod", c.los_aod}, {"los_aoa", c.los_aoa}}},
        {"motion", {{"speed", c.motion.speed}, {"heading", c.motion.heading}}},
        {"clusters",
         {{"count", c.num_clusters},
          {"rays", c.rays_per_cluster},
          {"delay_ratio", c.delay_ratio},
          {"delay_spread", c.delay_spread},
          {"cluster_asd", c.cluster_asd},
          {"composite_asd", c.composite_asd},
          {"range_mean", c.cluster_range_mean},
          {"range_min", c.cluster_range_min},
          {"power_model", c.power_model == PowerModel::winner ? "winner" : "massive_mimo"},
          {"winner_shadow_std_db", c.winner_shadow_std_db}}},
        {"large_scale",
         {{"shadow_sigma", c.shadow_sigma},
          {"shadow_sigma_units", c.shadow_sigma_units == SigmaUnits::db ? "db" : "natural"},
          {"decorr_distance", c.shadow_decorr},
          {"los_shadow_sigma", c.los_shadow_sigma},
          {"los_area_mean_db", c.los_area_mean_db},
          {"markov_rate_strong", c.markov_rate_strong},
          {"markov_rate_weak", c.markov_rate_weak},
          {"los_markov_rate", c.los_markov_rate},
          {"area_mean_coupling", c.area_mean_coupling}}},
        {"time", {{"samples", c.time_samples}, {"step", c.time_step}}},
    };
}

nsmimo::ScenarioConfig nsmimo::load_config(const std::filesystem::path &path)
{
    json j;
    try
    {
        j = json::parse(read_file(path));
    }
    catch (const json::parse_error &e)
    {
        throw ConfigError("", "cannot parse " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

void nsmimo::save_config(const ScenarioConfig &config, const std::filesystem::path &path)
{
    atomic_write(path, config_to_json(config).dump(2) + "\n");
}

std::string nsmimo::config_hash(const ScenarioConfig &config)
{
    const std::string canonical = config_to_json(config).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical)
    {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void nsmimo::atomic_write(const std::filesystem::path &path, const std::string &bytes)
{
    auto tmp = path;
    tmp += ".partial";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("Cannot open " + tmp.string() + " for writing.");
        out.write(bytes.data(), std::streamsize(bytes.size()));
        out.flush();
        if (!out)
        {
            out.close();
            std::filesystem::remove(tmp);
            throw std::runtime_error("Failed writing " + tmp.string() + ".");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
    {
        std::filesystem::remove(tmp);
        throw std::runtime_error("Cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

std::string nsmimo::read_file(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("Cannot open " + path.string() + ".");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string nsmimo::encode_tensor(const json &header_in, std::span<const std::size_t> shape,
                                  std::span<const std::complex<double>> data, TensorPrecision precision)
{
    std::size_t count = 1;
    for (auto s : shape)
        count *= s;
    if (count != data.size())
        throw std::invalid_argument("Tensor shape does not match the data length.");

    json header = header_in;
    header["format"] = "nsmimo-tensor";
    header["version"] = tensor_format_version;
    header["dtype"] = precision == TensorPrecision::complex64 ? "complex64" : "complex128";
    header["shape"] = std::vector<std::size_t>(shape.begin(), shape.end());
    header["byte_order"] = "little";
    const std::string text = header.dump();

    std::string out(tensor_magic, tensor_magic + 8);
    put_u64(out, text.size());
    out += text;
    out.reserve(out.size() + data.size() * (precision == TensorPrecision::complex64 ? 8 : 16));
    for (const auto &z : data)
    {
        if (precision == TensorPrecision::complex64)
        {
            put_float<std::uint32_t>(out, float(z.real()));
            put_float<std::uint32_t>(out, float(z.imag()));
        }
        else
        {
            put_float<std::uint64_t>(out, z.real());
            put_float<std::uint64_t>(out, z.imag());
        }
    }
    return out;
}

nsmimo::TensorFile nsmimo::decode_tensor(const std::string &bytes)
{
    if (bytes.size() < 16 || std::memcmp(bytes.data(), tensor_magic, 8) != 0)
        throw std::runtime_error("Not an nsmimo tensor file (bad magic).");
    const auto *u = reinterpret_cast<const unsigned char *>(bytes.data());
    const std::uint64_t hlen = get_u64(u + 8);
    if (hlen > bytes.size() - 16)
        throw std::runtime_error("Tensor header length exceeds the file size.");

    TensorFile t;
    t.header = json::parse(bytes.substr(16, hlen));
    if (t.header.value("version", 0) != tensor_format_version)
        throw std::runtime_error("Unsupported tensor format version.");
    t.shape = t.header.at("shape").get<std::vector<std::size_t>>();
    std::size_t count = 1;
    for (auto s : t.shape)
        count *= s;

    const std::string dtype = t.header.at("dtype").get<std::string>();
    const std::size_t width = dtype == "complex64" ? 4 : dtype == "complex128" ? 8 : 0;
    if (width == 0)
        throw std::runtime_error("Unknown tensor dtype " + dtype + ".");
    const std::size_t offset = 16 + hlen;
    if (bytes.size() - offset != count * 2 * width)
        throw std::runtime_error("Tensor payload size does not match the header.");

    t.data.resize(count);
    const unsigned char *p = u + offset;
    for (std::size_t i = 0; i < count; ++i, p += 2 * width)
    {
        if (width == 4)
            t.data[i] = {get_float<std::uint32_t, float>(p), get_float<std::uint32_t, float>(p + 4)};
        else
            t.data[i] = {get_float<std::uint64_t, double>(p), get_float<std::uint64_t, double>(p + 8)};
    }
    return t;
}

nsmimo::json nsmimo::realization_header(const ChannelRealization &r, const std::string &hash)
{
    return json{
        {"axes", {"rx", "tx", "tap", "time"}},
        {"delays", r.delays},
        {"time", {{"start", r.grid.start}, {"step", r.grid.step}, {"count", r.grid.count}}},
        {"tx_indices", r.tx_indices},
        {"rx_indices", r.rx_indices},
        {"wavelength", r.wavelength},
        {"scenario_seed", r.scenario_seed},
        {"track_seed", r.track_seed},
        {"config_hash", hash},
    };
}

void nsmimo::write_realization(const std::filesystem::path &path, const ChannelRealization &r,
                               const std::string &hash, TensorPrecision precision)
{
    const auto &s = r.gains.shape();
    atomic_write(path, encode_tensor(realization_header(r, hash), std::span<const std::size_t>(s.data(), s.size()),
                                     r.gains.data(), precision));
}

nsmimo::TensorFile nsmimo::read_tensor(const std::filesystem::path &path)
{
    return decode_tensor(read_file(path));
}

std::string nsmimo::format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string nsmimo::csv_preamble(const CsvMeta &meta)
{
    std::ostringstream out;
    out << "# schema_version: " << csv_schema_version << "\n";
    out << "# kind: " << meta.kind << "\n";
    out << "# estimator: " << meta.estimator << "\n";
    out << "# samples: " << meta.samples << "\n";
    out << "# seed: " << meta.seed << "\n";
    out << "# config_hash: " << meta.config_hash << "\n";
    for (const auto &[k, v] : meta.extra)
        out << "# " << k << ": " << v << "\n";
    return out.str();
}

std::string nsmimo::series_csv(std::span<const StatSeries> series, const CsvMeta &meta)
{
    std::ostringstream out;
    out << csv_preamble(meta);
    const std::string axis = series.empty() ? "x" : series.front().axis + "_" + series.front().unit;
    for (const auto &s : series)
        out << "# series: " << (s.label.empty() ? s.name : s.label) << " tap=" << s.tap << " anchor=" << s.anchor
            << " estimator=" << estimator_name(s.estimator) << " samples=" << s.samples << "\n";
    out << "label,estimator,tap,anchor," << axis << ",real,imag,abs,std_error,infinite\n";
    for (const auto &s : series)
    {
        s.check();
        const std::string label = s.label.empty() ? s.name : s.label;
        for (std::size_t i = 0; i < s.size(); ++i)
        {
            bool inf = !s.infinite.empty() && s.infinite[i];
            out << label << ',' << estimator_name(s.estimator) << ',' << s.tap << ',' << s.anchor << ','
                << format_double(s.grid[i]) << ',' << format_double(s.values[i].real()) << ','
                << format_double(s.values[i].imag()) << ',' << format_double(inf ? s.values[i].real() : std::abs(s.values[i]))
                << ',' << (s.std_error.empty() ? std::string() : format_double(s.std_error[i])) << ','
                << (inf ? 1 : 0) << '\n';
        }
    }
    return out.str();
}

std::string nsmimo::aps_csv(const ApsResult &aps, const CsvMeta &meta)
{
    std::ostringstream out;
    out << csv_preamble(meta);
    out << "window_start,angle_deg,power_db\n";
    for (std::size_t w = 0; w < aps.num_windows(); ++w)
        for (std::size_t a = 0; a < aps.angles.size(); ++a)
            out << aps.window_starts[w] << ',' << format_double(aps.angles[a] * 180.0 / pi) << ','
                << format_double(aps.at(w, a)) << '\n';
    return out.str();
}

std::string nsmimo::evolution_csv(const Scenario &scenario, const LargeScaleSet &tracks, const CsvMeta &meta)
{
    if (tracks.clusters.size() != scenario.clusters.size())
        throw std::invalid_argument("Need one large-scale track per cluster.");
    std::ostringstream out;
    out << csv_preamble(meta);
    out << "cluster,antenna,visible,power_db\n";
    auto emit = [&](int cluster, const LargeScaleTrack &t, double mean_power)
    {
        for (std::size_t i = 0; i < t.size(); ++i)
        {
            double p = mean_power * t.power_factor(i);
            out << cluster << ',' << i + 1 << ',' << int(t.visible[i]) << ','
                << format_double(p > 0.0 ? 10.0 * std::log10(p) : -std::numeric_limits<double>::infinity()) << '\n';
        }
    };
    emit(0, tracks.los, 1.0);
    for (std::size_t c = 0; c < tracks.clusters.size(); ++c)
        emit(scenario.clusters[c].index, tracks.clusters[c], scenario.clusters[c].mean_power);
    return out.str();
}
