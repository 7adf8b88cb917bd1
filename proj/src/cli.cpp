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


#include "nsmimo/cli.hpp"
#include "nsmimo/channel.hpp"
#include "nsmimo/doa.hpp"
#include "nsmimo/errors.hpp"
#include "nsmimo/stats.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <ctime>
#include <iostream>

namespace
{
    using namespace nsmimo;

    const std::vector<std::string> stats_kinds{"acf", "ccf", "power", "kfactor"};

    void check_options(const CommandOptions &o, const ScenarioConfig &c)
    {
        auto bad = [](const std::string &flag, const std::string &msg) { throw ConfigError(flag, msg); };
        if (o.runs < 2)
            bad("--runs", "needs at least 2 runs");
        if (o.jobs < 1)
            bad("--jobs", "must be at least 1");
        if (o.tap < -1 || o.tap > c.num_clusters)
            bad("--tap", "must be -1 or a tap index in 0.." + std::to_string(c.num_clusters));
        if (o.tx_antenna < 1 || o.tx_antenna > c.tx_array.num_elements)
            bad("--tx-antenna", "outside the BS array");
        if (o.rx_antenna < 1 || o.rx_antenna > c.rx_array.num_elements)
            bad("--rx-antenna", "outside the MS array");
        for (int p : o.ref_antennas)
            if (p < 1 || p > c.tx_array.num_elements)
                bad("--ref-antennas", "antenna " + std::to_string(p) + " outside the BS array");
        if (o.lags < 1 || o.lags > c.time_samples)
            bad("--lags", "must lie in 1.." + std::to_string(c.time_samples));
        if (o.max_spacing < 0)
            bad("--max-spacing", "cannot be negative");
        for (double s : o.sigma_db)
            if (!(s >= 0.0) || !std::isfinite(s))
                bad("--sigma-db", "values must be finite and non-negative");
        if (o.precision != "complex64" && o.precision != "complex128")
            bad("--precision", "expected complex64 or complex128");
    }

    LargeScaleSet cli_tracks(const Scenario &s, const ScenarioConfig &c, bool all_visible)
    {
        Rng rng = Rng::substream(c.seed, 0);
        LargeScaleSet set = draw_tracks(s, rng);
        if (all_visible)
        {
            std::fill(set.los.visible.begin(), set.los.visible.end(), 1);
            for (auto &t : set.clusters)
                std::fill(t.visible.begin(), t.visible.end(), 1);
        }
        return set;
    }

    ChannelRealization cli_realization(const Scenario &s, const ScenarioConfig &c, const CommandOptions &o,
                                       const AntennaSelection &sel)
    {
        auto r = synthesize(s, cli_tracks(s, c, o.all_visible), TimeGrid::for_config(c), sel);
        r.track_seed = c.seed;
        return r;
    }

    MonteCarloOptions mc_options(const CommandOptions &o, const ScenarioConfig &c)
    {
        MonteCarloOptions m;
        m.runs = o.runs;
        m.seed = c.seed;
        m.jobs = std::size_t(o.jobs);
        m.all_visible = o.all_visible;
        return m;
    }

    std::vector<StatSeries> keep_tap(std::vector<StatSeries> v, int tap)
    {
        if (tap < 0)
            return v;
        std::vector<StatSeries> out;
        for (auto &s : v)
            if (s.tap == tap)
                out.push_back(std::move(s));
        return out;
    }

    // Same config with the cluster shadow sigma replaced, LOS sigma kept at its dB value
    ScenarioConfig with_sigma_db(const ScenarioConfig &c, double sigma_db)
    {
        ScenarioConfig out = c;
        out.los_shadow_sigma = c.los_shadow_sigma_db();
        out.shadow_sigma = sigma_db;
        out.shadow_sigma_units = SigmaUnits::db;
        out.validate();
        return out;
    }

    std::string join(const std::vector<int> &v)
    {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i)
            s += (i ? "," : "") + std::to_string(v[i]);
        return s;
    }

    class ArtifactWriter
    {
    public:
        explicit ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {}

        void write(const std::string &name, const std::string &bytes)
        {
            names_.push_back(name);
            atomic_write(dir_ / name, bytes);
        }

        void write_tensor(const std::string &name, const ChannelRealization &r, const std::string &hash,
                          TensorPrecision precision)
        {
            names_.push_back(name);
            write_realization(dir_ / name, r, hash, precision);
        }

        void rollback() noexcept
        {
            std::error_code ec;
            for (const auto &n : names_)
            {
                std::filesystem::remove(dir_ / n, ec);
                std::filesystem::remove(dir_ / (n + ".partial"), ec);
            }
        }

        const std::vector<std::string> &names() const { return names_; }

    private:
        std::filesystem::path dir_;
        std::vector<std::string> names_;
    };

    void run_stats(const CommandOptions &o, const ScenarioConfig &c, const std::string &hash, ArtifactWriter &out)
    {
        CsvMeta meta;
        meta.kind = o.kind;
        meta.seed = c.seed;
        meta.config_hash = hash;
        std::vector<StatSeries> series;

        if (o.kind == "acf" || o.kind == "ccf")
        {
            const Scenario s = build_scenario(c);
            const TimeGrid grid = TimeGrid::for_config(c);
            meta.estimator = o.empirical ? "analytic+monte-carlo" : "analytic";
            meta.samples = o.empirical ? o.runs : 0;
            meta.extra.push_back({"rx_antenna", std::to_string(o.rx_antenna)});
            if (o.kind == "acf")
            {
                meta.extra.push_back({"tx_antenna", std::to_string(o.tx_antenna)});
                std::vector<int> lag_samples(std::size_t(o.lags));
                std::vector<double> lags(lag_samples.size());
                for (int k = 0; k < o.lags; ++k)
                {
                    lag_samples[std::size_t(k)] = k;
                    lags[std::size_t(k)] = k * grid.step;
                }
                series = keep_tap(acf_analytic(s, o.tx_antenna, o.rx_antenna, lags), o.tap);
                if (o.empirical)
                    for (auto &m : keep_tap(acf_monte_carlo(s, o.tx_antenna, o.rx_antenna, lag_samples, grid,
                                                            mc_options(o, c)),
                                            o.tap))
                        series.push_back(std::move(m));
            }
            else
            {
                meta.extra.push_back({"ref_antennas", join(o.ref_antennas)});
                meta.extra.push_back({"time_s", format_double(o.time)});
                for (int a : o.ref_antennas)
                    for (int tap = 0; tap <= c.num_clusters; ++tap)
                        if (o.tap < 0 || o.tap == tap)
                        {
                            series.push_back(ccf_curve_analytic(s, tap, a, o.rx_antenna, o.max_spacing, o.time));
                            series.back().label = "p=" + std::to_string(a);
                        }
                if (o.empirical)
                {
                    auto mc = ccf_curves_monte_carlo(s, o.ref_antennas, o.rx_antenna, o.max_spacing, o.time,
                                                     mc_options(o, c));
                    for (auto &m : keep_tap(std::move(mc), o.tap))
                    {
                        m.label = "p=" + std::to_string(m.anchor);
                        series.push_back(std::move(m));
                    }
                }
            }
        }
        else
        {
            std::vector<double> sigmas = o.sigma_db;
            if (sigmas.empty())
                sigmas.push_back(c.shadow_sigma_db());
            for (double sigma : sigmas)
            {
                const ScenarioConfig cs = with_sigma_db(c, sigma);
                const Scenario s = build_scenario(cs);
                const LargeScaleSet tracks = cli_tracks(s, cs, o.all_visible);
                StatSeries v = o.kind == "power" ? power_track(s, tracks) : k_factor_track(s, tracks);
                v.label = "sigma_db=" + format_double(sigma);
                if (o.kind == "power")
                    meta.extra.push_back({"dynamic_range_db[" + v.label + "]",
                                          format_double(power_dynamic_range_db(v))});
                series.push_back(std::move(v));
            }
        }
        out.write(o.kind + ".csv", series_csv(series, meta));
    }
}

nsmimo::json nsmimo::CommandOptions::to_json() const
{
    return json{{"command", command},
                {"kind", kind},
                {"config_path", config_path.string()},
                {"has_seed", has_seed},
                {"seed", seed},
                {"runs", runs},
                {"jobs", jobs},
                {"tap", tap},
                {"ref_antennas", ref_antennas},
                {"sigma_db", sigma_db},
                {"window", window},
                {"step", step},
                {"empirical", empirical},
                {"all_visible", all_visible},
                {"tx_antenna", tx_antenna},
                {"rx_antenna", rx_antenna},
                {"lags", lags},
                {"max_spacing", max_spacing},
                {"time", time},
                {"snapshots", snapshots},
                {"sources", sources},
                {"precision", precision}};
}

nsmimo::CommandOptions nsmimo::CommandOptions::from_json(const json &j)
{
    CommandOptions o;
    try
    {
        o.command = j.at("command").get<std::string>();
        o.kind = j.at("kind").get<std::string>();
        o.config_path = j.at("config_path").get<std::string>();
        o.has_seed = j.at("has_seed").get<bool>();
        o.seed = j.at("seed").get<std::uint64_t>();
        o.runs = j.at("runs").get<std::size_t>();
        o.jobs = j.at("jobs").get<int>();
        o.tap = j.at("tap").get<int>();
        o.ref_antennas = j.at("ref_antennas").get<std::vector<int>>();
        o.sigma_db = j.at("sigma_db").get<std::vector<double>>();
        o.window = j.at("window").get<int>();
        o.step = j.at("step").get<int>();
        o.empirical = j.at("empirical").get<bool>();
        o.all_visible = j.at("all_visible").get<bool>();
        o.tx_antenna = j.at("tx_antenna").get<int>();
        o.rx_antenna = j.at("rx_antenna").get<int>();
        o.lags = j.at("lags").get<int>();
        o.max_spacing = j.at("max_spacing").get<int>();
        o.time = j.at("time").get<double>();
        o.snapshots = j.at("snapshots").get<int>();
        o.sources = j.at("sources").get<int>();
        o.precision = j.at("precision").get<std::string>();
    }
    catch (const json::exception &e)
    {
        throw ConfigError("options", std::string("malformed manifest options: ") + e.what());
    }
    return o;
}

std::vector<std::string> nsmimo::run_command(const CommandOptions &o, const ScenarioConfig &config_in)
{
    ScenarioConfig c = config_in;
    if (o.has_seed)
        c.seed = o.seed;
    c.validate();
    check_options(o, c);
    const std::string hash = config_hash(c);

    std::filesystem::create_directories(o.out_dir);
    ArtifactWriter out(o.out_dir);
    const auto t0 = std::chrono::steady_clock::now();
    try
    {
        if (o.command == "generate")
        {
            const Scenario s = build_scenario(c);
            auto r = cli_realization(s, c, o, AntennaSelection::all(s));
            out.write_tensor("channel.nst", r, hash,
                             o.precision == "complex128" ? TensorPrecision::complex128 : TensorPrecision::complex64);
        }
        else if (o.command == "stats")
        {
            if (std::find(stats_kinds.begin(), stats_kinds.end(), o.kind) == stats_kinds.end())
                throw ConfigError("kind", "unknown statistic \"" + o.kind + "\" (expected acf, ccf, power or kfactor)");
            run_stats(o, c, hash, out);
        }
        else if (o.command == "aps")
        {
            MusicConfig mc;
            mc.window_size = o.window;
            mc.window_step = o.step;
            mc.tap = o.tap;
            mc.snapshots = o.snapshots;
            mc.num_sources = o.sources;
            try
            {
                mc.validate(c.tx_array.num_elements);
            }
            catch (const std::logic_error &e)
            {
                throw ConfigError("aps", e.what());
            }
            const Scenario s = build_scenario(c);
            AntennaSelection sel = AntennaSelection::all(s);
            sel.rx = {o.rx_antenna};
            auto r = cli_realization(s, c, o, sel);
            auto aps = sliding_aps(r, o.rx_antenna, mc);
            CsvMeta meta;
            meta.kind = "aps";
            meta.seed = c.seed;
            meta.config_hash = hash;
            meta.extra = {{"window", std::to_string(o.window)},
                          {"step", std::to_string(o.step)},
                          {"tap", o.tap < 0 ? std::string("all") : std::to_string(o.tap)},
                          {"rx_antenna", std::to_string(o.rx_antenna)},
                          {"windows", std::to_string(aps.num_windows())},
                          {"angles", std::to_string(aps.angles.size())},
                          {"rank_deficient", aps.rank_deficient ? "1" : "0"}};
            out.write("aps.csv", aps_csv(aps, meta));
        }
        else if (o.command == "evolve")
        {
            const Scenario s = build_scenario(c);
            CsvMeta meta;
            meta.kind = "evolution";
            meta.seed = c.seed;
            meta.config_hash = hash;
            meta.extra = {{"all_visible", o.all_visible ? "1" : "0"}};
            out.write("evolution.csv", evolution_csv(s, cli_tracks(s, c, o.all_visible), meta));
        }
        else
            throw ConfigError("command", "unknown command \"" + o.command + "\"");

        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const std::time_t now = std::time(nullptr);
        char stamp[32];
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        json manifest{{"tool", "nsmimo"},
                      {"version", library_version},
                      {"options", o.to_json()},
                      {"seed", c.seed},
                      {"config_hash", hash},
                      {"config", config_to_json(c)},
                      {"artifacts", out.names()},
                      {"finished_utc", stamp},
                      {"wall_clock_s", wall}};
        auto artifacts = out.names();
        out.write("manifest.json", manifest.dump(2) + "\n");
        return artifacts;
    }
    catch (...)
    {
        out.rollback();
        throw;
    }
}

int nsmimo::run_cli(int argc, const char *const *argv)
{
    CLI::App app{"Non-stationary wideband massive-MIMO channel simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", library_version);

    CommandOptions o;
    std::filesystem::path manifest_path;
    std::string config_path;

    auto common = [&](CLI::App *sub)
    {
        sub->add_option("--config", config_path, "Scenario config (JSON); built-in defaults when omitted");
        sub->add_option("--out", o.out_dir, "Output directory")->capture_default_str();
        sub->add_option_function<std::uint64_t>(
            "--seed", [&](std::uint64_t s) { o.seed = s, o.has_seed = true; }, "Override the config seed");
        sub->add_flag("--all-visible", o.all_visible, "Force every path visible on every antenna");
    };

    auto *gen = app.add_subcommand("generate", "Draw one realization and write the CIR tensor");
    common(gen);
    gen->add_option("--precision", o.precision, "complex64 or complex128")->capture_default_str();

    auto *stats = app.add_subcommand("stats", "Correlation, power and K-factor statistics as CSV");
    common(stats);
    stats->add_option("kind", o.kind, "acf, ccf, power or kfactor")->required()->check(CLI::IsMember(stats_kinds));
    stats->add_option("--runs", o.runs, "Monte-Carlo runs")->capture_default_str();
    stats->add_option("--jobs", o.jobs, "Worker threads")->capture_default_str();
    stats->add_option("--tap", o.tap, "Restrict to one tap (0 = LOS), -1 = all")->capture_default_str();
    stats->add_option("--ref-antennas", o.ref_antennas, "CCF anchor antennas")->delimiter(',')->capture_default_str();
    stats->add_option("--sigma-db", o.sigma_db, "Cluster shadow sigmas for power / kfactor [dB]")->delimiter(',');
    stats->add_flag("--empirical,!--analytic", o.empirical, "Add Monte-Carlo estimates next to the analytic ones");
    stats->add_option("--tx-antenna", o.tx_antenna, "BS antenna for the ACF")->capture_default_str();
    stats->add_option("--rx-antenna", o.rx_antenna, "MS antenna")->capture_default_str();
    stats->add_option("--lags", o.lags, "Number of ACF lags in time samples")->capture_default_str();
    stats->add_option("--max-spacing", o.max_spacing, "Largest CCF antenna spacing")->capture_default_str();
    stats->add_option("--time", o.time, "CCF evaluation time [s]")->capture_default_str();

    auto *aps = app.add_subcommand("aps", "Sliding-window MUSIC angular power spectrum as CSV");
    common(aps);
    aps->add_option("--window", o.window, "Antennas per window")->capture_default_str();
    aps->add_option("--step", o.step, "Window shift")->capture_default_str();
    aps->add_option("--tap", o.tap, "Single tap (0 = LOS), -1 = sum of all taps")->capture_default_str();
    aps->add_option("--rx-antenna", o.rx_antenna, "MS antenna")->capture_default_str();
    aps->add_option("--snapshots", o.snapshots, "Time samples per covariance, 0 = all")->capture_default_str();
    aps->add_option("--sources", o.sources, "Signal subspace size, -1 = auto")->capture_default_str();

    auto *evolve = app.add_subcommand("evolve", "Per-cluster visibility and power along the array as CSV");
    common(evolve);

    auto *replay = app.add_subcommand("replay", "Re-run a command from its manifest");
    replay->add_option("manifest", manifest_path, "manifest.json of an earlier run")->required();
    replay->add_option("--out", o.out_dir, "Output directory for the replayed artifacts")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try
    {
        ScenarioConfig config;
        if (replay->parsed())
        {
            json m;
            try
            {
                m = json::parse(read_file(manifest_path));
            }
            catch (const std::exception &e)
            {
                throw ConfigError(manifest_path.string(), std::string("cannot read manifest: ") + e.what());
            }
            if (!m.contains("options") || !m.contains("config"))
                throw ConfigError(manifest_path.string(), "not a run manifest");
            const auto out_dir = o.out_dir;
            o = CommandOptions::from_json(m["options"]);
            o.out_dir = out_dir;
            config = config_from_json(m["config"]);
        }
        else
        {
            o.command = app.get_subcommands().front()->get_name();
            if (!config_path.empty())
            {
                if (!std::filesystem::is_regular_file(config_path))
                    throw ConfigError(config_path, "config file not found");
                config = load_config(config_path);
                o.config_path = config_path;
            }
        }
        auto artifacts = run_command(o, config);
        for (const auto &a : artifacts)
            std::cout << (o.out_dir / a).string() << "\n";
        std::cout << (o.out_dir / "manifest.json").string() << "\n";
        return 0;
    }
    catch (const ConfigError &e)
    {
        std::cerr << "nsmimo: config error: " << e.what() << "\n";
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "nsmimo: error: " << e.what() << "\n";
        return 3;
    }
}
