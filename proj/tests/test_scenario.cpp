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
#include "nsmimo/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

using namespace nsmimo;
using doctest::Approx;

TEST_CASE("WINNER cluster power")
{
    CHECK(cluster_power_winner(0.0, 2.3, 365e-9, 0.0) == 1.0);
    CHECK(cluster_power_winner(1e-6, 2.0, 1e-6, 0.0) == Approx(0.6065306597126334).epsilon(1e-14));
    CHECK(cluster_power_winner(1e-6, 2.0, 1e-6, 3.0) == Approx(0.30398542345149915).epsilon(1e-14));
    CHECK_THROWS_AS(cluster_power_winner(0.0, 1.0, 1e-6, 0.0), std::domain_error);
    CHECK_THROWS_AS(cluster_power_winner(0.0, 2.0, 0.0, 0.0), std::domain_error);

    // Larger delay, smaller power
    CHECK(cluster_power_winner(2e-7, 2.3, 365e-9, 0.0) > cluster_power_winner(3e-7, 2.3, 365e-9, 0.0));
}

TEST_CASE("power normalization")
{
    std::vector<double> single{2.0};
    CHECK(normalize_powers(single) == std::vector<double>{1.0});
    std::vector<double> three{1.0, 1.0, 2.0};
    CHECK(normalize_powers(three) == std::vector<double>{0.25, 0.25, 0.5});
    std::vector<double> zeros{0.0, 0.0};
    CHECK_THROWS_AS(normalize_powers(zeros), std::domain_error);
}

TEST_CASE("large-scale parameter assignment")
{
    ScenarioConfig cfg;
    std::vector<double> p{0.7, 0.2, 0.1};
    auto ls = assign_large_scale_params(p, cfg);
    CHECK(ls[0].visibility.rate_visible == cfg.markov_rate_strong);
    CHECK(ls[1].visibility.rate_visible == cfg.markov_rate_weak);
    CHECK(ls[2].visibility.rate_visible == cfg.markov_rate_weak);
    CHECK(ls[0].shadow.mean_db == Approx(cfg.area_mean_coupling * 0.7));

    std::vector<double> equal(4, 0.25);
    for (const auto &c : assign_large_scale_params(equal, cfg))
    {
        CHECK(c.visibility.rate_visible == cfg.markov_rate_strong);
        CHECK(c.visibility.rate_invisible == cfg.markov_rate_strong);
    }

    std::vector<double> with_zero{1.0, 0.0};
    CHECK(assign_large_scale_params(with_zero, cfg)[1].shadow.mean_db == 0.0);

    // Natural-unit sigma 0.2 converted to dB
    CHECK(ls[0].shadow.sigma_db == Approx(0.2 * 20 / std::log(10.0)));
    CHECK(ls[0].shadow.natural_sigma() == Approx(0.2));
}

TEST_CASE("cluster geometry draws")
{
    ScenarioConfig cfg;
    Rng rng(2);
    const int n = 100000;
    double sum = 0.0, min_range = 1e300;
    const double half = std::sqrt(3.0) * cfg.composite_asd;
    bool inside = true;
    for (int k = 0; k < n; ++k)
    {
        auto pl = draw_cluster_geometry(cfg, rng);
        sum += pl.range - 20.0;
        min_range = std::min(min_range, pl.range);
        inside = inside && std::abs(wrap_angle(pl.azimuth_tx - cfg.los_aod)) <= half + 1e-12;
    }
    CHECK(sum / n == Approx(15.0).epsilon(0.01));
    CHECK(min_range >= 20.0);
    CHECK(inside);
}

TEST_CASE("ray draws")
{
    Rng rng(4);
    auto flat = draw_rays(0.3, -1.2, 7, 0.0, rng);
    for (int m = 0; m < 7; ++m)
    {
        CHECK(flat.aods[m] == Approx(0.3));
        CHECK(flat.aoas[m] == Approx(-1.2));
    }
    CHECK_THROWS(draw_rays(0.0, 0.0, 0, 0.1, rng));

    const double asd = pi / 12;
    auto rays = draw_rays(0.0, 0.0, 100000, asd, rng);
    double s2 = 0.0;
    std::vector<double> phases = rays.phases;
    for (double a : rays.aods)
        s2 += a * a;
    CHECK(std::sqrt(s2 / rays.aods.size()) == Approx(asd).epsilon(0.01));

    // Kolmogorov-Smirnov distance of the phases against U[0, 2 pi)
    std::sort(phases.begin(), phases.end());
    double ks = 0.0;
    const double n = double(phases.size());
    for (std::size_t i = 0; i < phases.size(); ++i)
    {
        double F = phases[i] / two_pi;
        ks = std::max({ks, std::abs(F - i / n), std::abs(F - (i + 1) / n)});
    }
    CHECK(ks < 1.63 / std::sqrt(n)); // p > 0.01
    CHECK(phases.front() >= 0.0);
    CHECK(phases.back() < two_pi);
}

TEST_CASE("scenario build")
{
    ScenarioConfig cfg;
    auto a = build_scenario(cfg);
    auto b = build_scenario(cfg);
    REQUIRE(a.clusters.size() == 20);
    CHECK(a.num_taps() == 21);

    double total = 0.0;
    for (std::size_t c = 0; c < 20; ++c)
    {
        total += a.clusters[c].mean_power;
        CHECK(a.clusters[c].placement.range >= cfg.cluster_range_min);
        CHECK(a.clusters[c].rays.aods.size() == 20);
        CHECK(a.clusters[c].index == int(c) + 1);
        CHECK(a.clusters[c].rays.aods == b.clusters[c].rays.aods);
        CHECK(a.clusters[c].rays.phases == b.clusters[c].rays.phases);
        CHECK(a.clusters[c].delay == b.clusters[c].delay);
        if (c > 0)
        {
            CHECK(a.clusters[c].delay >= a.clusters[c - 1].delay);
            CHECK(a.clusters[c].mean_power <= a.clusters[c - 1].mean_power);
        }
    }
    CHECK(total == Approx(1.0).epsilon(1e-12));
    CHECK(a.clusters[0].delay == 0.0);

    auto delays = a.tap_delays();
    CHECK(delays[0] == Approx(50.0 / speed_of_light));
    CHECK(delays[5] == Approx(delays[0] + a.clusters[4].delay));

    ScenarioConfig other = cfg;
    other.seed = 2;
    CHECK(build_scenario(other).clusters[0].rays.phases != a.clusters[0].rays.phases);

    ScenarioConfig winner = cfg;
    winner.power_model = PowerModel::winner;
    double wsum = 0.0;
    for (const auto &c : build_scenario(winner).clusters)
        wsum += c.mean_power;
    CHECK(wsum == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ray redraw keeps cluster centres")
{
    auto s = build_scenario(ScenarioConfig{});
    Rng rng(77);
    auto r = redraw_rays(s, rng);
    CHECK(r.clusters[3].placement == s.clusters[3].placement);
    CHECK(r.clusters[3].mean_power == s.clusters[3].mean_power);
    CHECK(r.clusters[3].rays.phases != s.clusters[3].rays.phases);

    s.clusters[0].rays = {};
    CHECK(redraw_rays(s, rng).clusters[0].rays.aods.size() == 20);
}

TEST_CASE("config validation names the key")
{
    ScenarioConfig cfg;
    cfg.d_tr = -1.0;
    try
    {
        cfg.validate();
        FAIL("expected ConfigError");
    }
    catch (const ConfigError &e)
    {
        CHECK(e.key_path() == "link.d_tr");
    }
    ScenarioConfig c2;
    c2.num_clusters = 0;
    CHECK_THROWS_AS(c2.validate(), ConfigError);
    ScenarioConfig c3;
    c3.delay_ratio = 1.0;
    CHECK_THROWS_AS(build_scenario(c3), ConfigError);
}
