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


#include "nsmimo/channel.hpp"
#include "nsmimo/cli.hpp"
#include "nsmimo/doa.hpp"
#include "nsmimo/errors.hpp"
#include "nsmimo/io.hpp"
#include "nsmimo/scenario.hpp"
#include "nsmimo/stats.hpp"

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace nsmimo;
using cd = std::complex<double>;

namespace
{
    py::array_t<cd> to_array(std::span<const cd> data, std::vector<py::ssize_t> shape)
    {
        py::array_t<cd> out(shape);
        std::copy(data.begin(), data.end(), out.mutable_data());
        return out;
    }

    py::array_t<double> to_array(const std::vector<double> &v)
    {
        py::array_t<double> out(py::ssize_t(v.size()));
        std::copy(v.begin(), v.end(), out.mutable_data());
        return out;
    }

    ScenarioConfig parse_config(const std::string &text)
    {
        json j;
        try
        {
            j = json::parse(text);
        }
        catch (const json::parse_error &e)
        {
            throw ConfigError("", std::string("invalid JSON: ") + e.what());
        }
        return config_from_json(j);
    }

    LargeScaleSet tracks_for(const Scenario &s, std::uint64_t seed, bool all_visible)
    {
        Rng rng = Rng::substream(seed, 0);
        auto set = draw_tracks(s, rng);
        if (all_visible)
        {
            std::fill(set.los.visible.begin(), set.los.visible.end(), 1);
            for (auto &t : set.clusters)
                std::fill(t.visible.begin(), t.visible.end(), 1);
        }
        return set;
    }

    py::array_t<double> real_values(const StatSeries &s)
    {
        std::vector<double> v;
        for (auto z : s.values)
            v.push_back(z.real());
        return to_array(v);
    }
}

PYBIND11_MODULE(_nsmimo, m)
{
    m.doc() = "Non-stationary wideband massive-MIMO channel model (C++ core)";
    m.attr("__version__") = library_version;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ResourceError>(m, "ResourceError", PyExc_MemoryError);
    py::register_exception<EstimatorError>(m, "EstimatorError", PyExc_RuntimeError);

    m.def("default_config_json", [] { return config_to_json(ScenarioConfig{}).dump(); });
    m.def("canonical_config_json", [](const std::string &text) { return config_to_json(parse_config(text)).dump(); },
          py::arg("config_json"), "Validate a config document and return its canonical form");
    m.def("config_hash", [](const std::string &text) { return config_hash(parse_config(text)); },
          py::arg("config_json"));

    py::class_<Scenario>(m, "Scenario")
        .def(py::init([](const std::string &text) { return build_scenario(parse_config(text)); }),
             py::arg("config_json"))
        .def_property_readonly("num_taps", &Scenario::num_taps)
        .def_property_readonly("num_tx", [](const Scenario &s) { return s.config.tx_array.num_elements; })
        .def_property_readonly("num_rx", [](const Scenario &s) { return s.config.rx_array.num_elements; })
        .def_property_readonly("wavelength", &Scenario::wavelength)
        .def_property_readonly("tap_delays", [](const Scenario &s) { return to_array(s.tap_delays()); })
        .def_property_readonly("config_json", [](const Scenario &s) { return config_to_json(s.config).dump(); })
        .def_property_readonly("clusters",
                               [](const Scenario &s)
                               {
                                   py::list out;
                                   for (const auto &c : s.clusters)
                                   {
                                       py::dict d;
                                       d["index"] = c.index;
                                       d["range"] = c.placement.range;
                                       d["aod"] = c.placement.azimuth_tx;
                                       d["aoa"] = c.placement.azimuth_rx;
                                       d["delay"] = c.delay;
                                       d["mean_power"] = c.mean_power;
                                       d["rate_visible"] = c.visibility.rate_visible;
                                       d["rate_invisible"] = c.visibility.rate_invisible;
                                       out.append(d);
                                   }
                                   return out;
                               });

    py::class_<ChannelRealization>(m, "Realization")
        .def_property_readonly("gains",
                               [](const ChannelRealization &r)
                               {
                                   const auto &s = r.gains.shape();
                                   return to_array(r.gains.data(), {py::ssize_t(s[0]), py::ssize_t(s[1]),
                                                                    py::ssize_t(s[2]), py::ssize_t(s[3])});
                               },
                               "Complex gains, axes (rx, tx, tap, time)")
        .def_property_readonly("delays", [](const ChannelRealization &r) { return to_array(r.delays); })
        .def_property_readonly("times",
                               [](const ChannelRealization &r)
                               {
                                   std::vector<double> t;
                                   for (int i = 0; i < r.grid.count; ++i)
                                       t.push_back(r.grid.start + i * r.grid.step);
                                   return to_array(t);
                               })
        .def_property_readonly("wavelength", [](const ChannelRealization &r) { return r.wavelength; })
        .def_property_readonly("track_seed", [](const ChannelRealization &r) { return r.track_seed; });

    m.def(
        "synthesize",
        [](const Scenario &s, std::uint64_t seed, bool all_visible)
        {
            auto r = synthesize(s, tracks_for(s, seed, all_visible), TimeGrid::for_config(s.config),
                                AntennaSelection::all(s));
            r.track_seed = seed;
            return r;
        },
        py::arg("scenario"), py::arg("seed") = 1, py::arg("all_visible") = false,
        py::call_guard<py::gil_scoped_release>(),
        "One realization with large-scale tracks from substream (seed, 0), as the CLI does");

    m.def(
        "acf_analytic",
        [](const Scenario &s, int p, int q, const std::vector<double> &lags)
        {
            auto series = acf_analytic(s, p, q, lags);
            std::vector<cd> flat;
            for (const auto &x : series)
                flat.insert(flat.end(), x.values.begin(), x.values.end());
            return to_array(flat, {py::ssize_t(series.size()), py::ssize_t(lags.size())});
        },
        py::arg("scenario"), py::arg("p"), py::arg("q"), py::arg("lags"), "Time ACF per tap, shape (taps, lags)");

    m.def("ccf_analytic", &ccf_analytic, py::arg("scenario"), py::arg("tap"), py::arg("p"), py::arg("p2"),
          py::arg("q"), py::arg("q2"), py::arg("t") = 0.0);

    m.def(
        "ccf_curve_analytic",
        [](const Scenario &s, int tap, int anchor, int q, int max_spacing, double t)
        {
            auto c = ccf_curve_analytic(s, tap, anchor, q, max_spacing, t);
            return to_array(c.values, {py::ssize_t(c.values.size())});
        },
        py::arg("scenario"), py::arg("tap"), py::arg("anchor"), py::arg("q") = 1, py::arg("max_spacing") = 20,
        py::arg("t") = 0.0);

    m.def(
        "power_track",
        [](const Scenario &s, std::uint64_t seed, bool all_visible)
        { return real_values(power_track(s, tracks_for(s, seed, all_visible))); },
        py::arg("scenario"), py::arg("seed") = 1, py::arg("all_visible") = false);

    m.def(
        "k_factor_track",
        [](const Scenario &s, std::uint64_t seed, bool all_visible)
        { return real_values(k_factor_track(s, tracks_for(s, seed, all_visible))); },
        py::arg("scenario"), py::arg("seed") = 1, py::arg("all_visible") = false, "LOS / NLOS power, inf where no cluster is visible");

    m.def(
        "power_dynamic_range_db",
        [](const Scenario &s, std::uint64_t seed) { return power_dynamic_range_db(power_track(s, tracks_for(s, seed, false))); },
        py::arg("scenario"), py::arg("seed") = 1);

    m.def(
        "sliding_aps",
        [](const ChannelRealization &r, int q, int window, int step, int tap)
        {
            MusicConfig cfg;
            cfg.window_size = window;
            cfg.window_step = step;
            cfg.tap = tap;
            ApsResult aps;
            {
                py::gil_scoped_release release;
                aps = sliding_aps(r, q, cfg);
            }
            py::array_t<double> spec({py::ssize_t(aps.num_windows()), py::ssize_t(aps.angles.size())});
            std::copy(aps.spectrum_db.begin(), aps.spectrum_db.end(), spec.mutable_data());
            py::dict d;
            d["window_starts"] = aps.window_starts;
            d["angles"] = to_array(aps.angles);
            d["spectrum_db"] = spec;
            d["num_sources"] = aps.num_sources;
            d["rank_deficient"] = aps.rank_deficient;
            return d;
        },
        py::arg("realization"), py::arg("q") = 1, py::arg("window") = 12, py::arg("step") = 1, py::arg("tap") = -1);

    m.def(
        "write_realization",
        [](const std::string &path, const ChannelRealization &r, const std::string &precision)
        {
            if (precision != "complex64" && precision != "complex128")
                throw py::value_error("precision must be complex64 or complex128");
            write_realization(path, r, "", precision == "complex64" ? TensorPrecision::complex64
                                                                     : TensorPrecision::complex128);
        },
        py::arg("path"), py::arg("realization"), py::arg("precision") = "complex64");

    m.def(
        "read_tensor",
        [](const std::string &path)
        {
            auto t = read_tensor(path);
            std::vector<py::ssize_t> shape(t.shape.begin(), t.shape.end());
            return py::make_tuple(t.header.dump(), to_array(t.data, shape));
        },
        py::arg("path"), "Returns (header JSON text, complex128 array)");

    m.def(
        "run_cli",
        [](const std::vector<std::string> &args)
        {
            std::vector<const char *> argv{"nsmimo"};
            for (const auto &a : args)
                argv.push_back(a.c_str());
            py::gil_scoped_release release;
            return run_cli(int(argv.size()), argv.data());
        },
        py::arg("args"), "Run the command-line front end in-process; returns the exit code");
}
