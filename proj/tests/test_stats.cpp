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
#include "nsmimo/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace nsmimo;
using doctest::Approx;
using cd = std::complex<double>;

namespace
{
    ScenarioConfig small_config()
    {
        ScenarioConfig cfg;
        cfg.tx_array = ArraySpec(32, cfg.wavelength() / 2, pi / 2);
        cfg.rx_array = ArraySpec(4, cfg.wavelength() / 2, pi / 4);
        cfg.num_clusters = 3;
        cfg.time_samples = 64;
        return cfg;
    }

    double median(std::vector<double> v)
    {
        std::sort(v.begin(), v.end());
        return v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
    }
}

TEST_CASE("compensated moments")
{
    KahanSum k;
    k.add(1.0);
    for (int i = 0; i < 1000000; ++i)
        k.add(1e-16);
    CHECK(k.value() == Approx(1.0 + 1e-10).epsilon(1e-15));

    ComplexMoments m, a, b;
    std::vector<cd> xs{{1, 2}, {3, -1}, {0.5, 0.5}, {-2, 4}};
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
        m.add(xs[i]);
        (i < 2 ? a : b).add(xs[i]);
    }
    a.merge(b);
    CHECK(m.count() == 4);
    CHECK(m.mean() == a.mean());
    CHECK(m.mean().real() == Approx(0.625));
    CHECK(m.mean().imag() == Approx(1.375));
    // var(Re) = 4.229..., var(Im) = 4.729...
    double var_re = 0, var_im = 0;
    for (auto x : xs)
    {
        var_re += std::pow(x.real() - 0.625, 2) / 3;
        var_im += std::pow(x.imag() - 1.375, 2) / 3;
    }
    CHECK(m.std_error() == Approx(std::sqrt((var_re + var_im) / 4)));
    CHECK(std::isinf(ComplexMoments{}.std_error()));
}

TEST_CASE("angle quadrature")
{
    AngleQuadrature q(0.3, 0.2);
    CHECK(q.nodes.size() == 1024);
    CHECK(std::accumulate(q.weights.begin(), q.weights.end(), 0.0) == Approx(1.0));
    // E[cos(X)] for X ~ N(mu, s^2) is cos(mu) e^{-s^2/2}
    double e = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i)
        e += q.weights[i] * std::cos(q.nodes[i]);
    CHECK(e == Approx(std::cos(0.3) * std::exp(-0.02)).epsilon(1e-12));

    AngleQuadrature delta(1.0, 0.0);
    CHECK(delta.nodes.size() == 1);
    CHECK_THROWS(AngleQuadrature(0.0, -1.0));
}

TEST_CASE("analytic ACF")
{
    auto s = build_scenario(small_config());
    const auto &los = s.los;
    CHECK(acf_analytic_value(s, 0, 1, 1, 0.0) ==
          cd(lognormal_second_moment(los.shadow) * los.visibility.visible_probability(), 0.0));

    for (int tap = 0; tap < s.num_taps(); ++tap)
    {
        auto r0 = acf_analytic_value(s, tap, 3, 2, 0.0);
        CHECK(r0.real() > 0.0);
        CHECK(std::abs(r0.imag()) < 1e-15);
        for (double lag : {1e-3, 4e-3})
        {
            auto fwd = acf_analytic_value(s, tap, 3, 2, lag);
            auto bwd = acf_analytic_value(s, tap, 3, 2, -lag);
            CHECK(std::abs(fwd - std::conj(bwd)) < 1e-14);
            CHECK(std::abs(fwd) <= std::abs(r0) * (1 + 1e-12));
        }
    }

    auto still = small_config();
    still.motion = Motion(0.0, 0.0);
    auto s0 = build_scenario(still);
    for (int tap = 0; tap < s0.num_taps(); ++tap)
        CHECK(std::abs(acf_analytic_value(s0, tap, 1, 1, 0.01) - acf_analytic_value(s0, tap, 1, 1, 0.0)) < 1e-15);

    // Zero ray spread: pure cisoid
    auto pure = small_config();
    pure.cluster_asd = 0.0;
    auto sp = build_scenario(pure);
    const auto &c = sp.clusters[0];
    double expect = lognormal_second_moment(c.shadow) * c.visibility.visible_probability() * c.mean_power;
    for (double lag : {0.0, 1e-3, 7e-3, 0.1})
        CHECK(std::abs(acf_analytic_value(sp, 1, 1, 1, lag)) == Approx(expect).epsilon(1e-12));

    std::vector<double> lags{0.0, 1e-3};
    auto all = acf_analytic(s, 1, 1, lags);
    CHECK(all.size() == std::size_t(s.num_taps()));
    CHECK(all[2].values[1] == acf_analytic_value(s, 2, 1, 1, 1e-3));
    CHECK_THROWS(acf_analytic_value(s, 9, 1, 1, 0.0));
}

TEST_CASE("analytic CCF")
{
    auto s = build_scenario(ScenarioConfig{});
    const auto &los = s.los;
    const double dx = s.config.tx_array.spacing;
    auto z = ccf_analytic(s, 0, 10, 10, 3, 3, 0.37);
    CHECK(z.real() == Approx(lognormal_acf(0, dx, los.shadow) * visibility_correlation(0, dx, los.visibility)));
    CHECK(std::abs(z.imag()) < 1e-12);

    for (int tap = 1; tap < s.num_taps(); ++tap)
    {
        const auto &c = s.clusters[std::size_t(tap - 1)];
        auto v = ccf_analytic(s, tap, 40, 40, 2, 2, 0.2);
        CHECK(v.real() == Approx(lognormal_second_moment(c.shadow) * c.visibility.visible_probability() * c.mean_power));
        CHECK(std::abs(v.imag()) < 1e-12);
        // Zero separation equals the zero-lag ACF
        CHECK(std::abs(v) == Approx(std::abs(acf_analytic_value(s, tap, 40, 2, 0.0))));
    }

    // LOS phase advances by 2 pi t (f_p - f_p')
    const int p = 1, p2 = 11;
    auto a = ccf_analytic(s, 0, p, p2, 1, 1, 0.0);
    auto b = ccf_analytic(s, 0, p, p2, 1, 1, 0.1);
    auto f = [&](int i)
    { return doppler_los(los.placement.azimuth_tx, s.config.tx_array, i, los.placement.range, s.config.motion, s.wavelength()); };
    CHECK(std::arg(b / a) == Approx(wrap_angle(two_pi * 0.1 * (f(p) - f(p2)))).epsilon(1e-9));
    CHECK(std::abs(a) == Approx(std::abs(b)));

    CHECK(ccf_partner(1, 5, 128) == 6);
    CHECK(ccf_partner(128, 5, 128) == 123);
    CHECK(ccf_partner(64, 0, 128) == 64);
    CHECK_THROWS(ccf_partner(64, 128, 128));

    // Near cluster: curves depend on the anchor
    auto near_cfg = ScenarioConfig{};
    auto sn = build_scenario(near_cfg);
    auto &cl = sn.clusters[0];
    cl.placement = Placement(20.0, cl.placement.azimuth_tx, cl.placement.azimuth_rx);
    auto c1 = ccf_curve_analytic(sn, 1, 1, 1, 20, 0.0);
    auto c64 = ccf_curve_analytic(sn, 1, 64, 1, 20, 0.0);
    double norm = std::abs(c1.values[0]), diff = 0.0;
    for (int k = 0; k <= 20; ++k)
        diff = std::max(diff, std::abs(std::abs(c1.values[k]) - std::abs(c64.values[k])) / norm);
    CHECK(diff > 0.05);

    // ... and stop depending on it in the far field
    cl.placement = Placement(1e6, cl.placement.azimuth_tx, cl.placement.azimuth_rx);
    auto f1 = ccf_curve_analytic(sn, 1, 1, 1, 20, 0.0);
    auto f64 = ccf_curve_analytic(sn, 1, 64, 1, 20, 0.0);
    for (int k = 0; k <= 20; ++k)
        CHECK(std::abs(std::abs(f1.values[k]) - std::abs(f64.values[k])) < 1e-4 * norm);
}

TEST_CASE("power and K-factor tracks")
{
    auto s = build_scenario(small_config());
    auto unit = unit_tracks(s);
    auto P = power_track(s, unit);
    CHECK(P.values.size() == 32);
    CHECK_FALSE(P.complex_valued);
    for (auto v : P.values)
        CHECK(v.real() == Approx(2.0)); // LOS 1 + sum P_c = 1

    auto K = k_factor_track(s, unit);
    for (auto v : K.values)
        CHECK(v.real() == Approx(1.0));

    auto dark = unit;
    for (auto &t : dark.clusters)
        t.visible.assign(t.visible.size(), 0);
    dark.los.visible[4] = 0;
    auto Pd = power_track(s, dark);
    CHECK(Pd.values[0].real() == Approx(1.0));
    CHECK(Pd.values[4].real() == 0.0);
    auto Kd = k_factor_track(s, dark);
    CHECK(Kd.infinite[0] == 1);
    CHECK(std::isinf(Kd.values[0].real()));

    auto no_los = unit;
    no_los.los.visible.assign(32, 0);
    CHECK(k_factor_track(s, no_los).values[7].real() == 0.0);

    // Cluster relabeling does not change the sums
    auto perm = s;
    std::reverse(perm.clusters.begin(), perm.clusters.end());
    Rng rng(3);
    auto tr = draw_tracks(s, rng);
    auto tr_perm = tr;
    std::reverse(tr_perm.clusters.begin(), tr_perm.clusters.end());
    auto a = power_track(s, tr), b = power_track(perm, tr_perm);
    for (std::size_t i = 0; i < 32; ++i)
        CHECK(a.values[i].real() == Approx(b.values[i].real()).epsilon(1e-14));
}

TEST_CASE("dynamic range grows with shadow sigma")
{
    std::vector<double> medians;
    for (double sigma : {2.0, 4.0, 8.0})
    {
        auto cfg = ScenarioConfig{};
        cfg.shadow_sigma_units = SigmaUnits::db;
        cfg.shadow_sigma = cfg.los_shadow_sigma = sigma;
        auto s = build_scenario(cfg);
        TrackGenerator gen(s);
        Rng rng(17);
        std::vector<double> ranges;
        for (int k = 0; k < 100; ++k)
            ranges.push_back(power_dynamic_range_db(power_track(s, gen.draw(rng))));
        medians.push_back(median(ranges));
    }
    CHECK(medians[0] < medians[1]);
    CHECK(medians[1] < medians[2]);
}

TEST_CASE("Monte-Carlo driver is independent of the job count")
{
    auto s = build_scenario(small_config());
    auto grid = TimeGrid::for_config(s.config);
    std::vector<int> lags{0, 2, -2};
    MonteCarloOptions one;
    one.runs = 70;
    one.seed = 5;
    MonteCarloOptions three = one;
    three.jobs = 3;
    auto a = acf_monte_carlo(s, 2, 1, lags, grid, one);
    auto b = acf_monte_carlo(s, 2, 1, lags, grid, three);
    for (std::size_t tap = 0; tap < a.size(); ++tap)
    {
        CHECK(a[tap].values == b[tap].values);
        CHECK(a[tap].std_error == b[tap].std_error);
        CHECK(a[tap].samples == 70);
        // Empirical Hermitian symmetry
        CHECK(std::abs(a[tap].values[1] - std::conj(a[tap].values[2])) < 1e-12);
    }
}

TEST_CASE("empirical estimators agree with the analytic ones")
{
    auto s = build_scenario(small_config());
    auto grid = TimeGrid::for_config(s.config);
    MonteCarloOptions o;
    o.runs = 1500;
    std::vector<int> lags{0, 1, 3, 6};
    auto emp = acf_monte_carlo(s, 5, 2, lags, grid, o);
    for (int tap = 0; tap < s.num_taps(); ++tap)
        for (std::size_t k = 0; k < lags.size(); ++k)
        {
            auto an = acf_analytic_value(s, tap, 5, 2, lags[k] * grid.step);
            CHECK(within_se(emp[std::size_t(tap)].values[k], an, emp[std::size_t(tap)].std_error[k], 4.0));
        }
    CHECK(emp[0].values[0].real() > 0.0);
    CHECK(emp[0].values[0].imag() == 0.0);

    auto cc = ccf_monte_carlo(s, 3, 9, 1, 4, 0.05, o);
    for (int tap = 0; tap < s.num_taps(); ++tap)
        CHECK(within_se(cc[std::size_t(tap)].value, ccf_analytic(s, tap, 3, 9, 1, 4, 0.05),
                        cc[std::size_t(tap)].std_error, 4.0));
}

TEST_CASE("estimators over stored realizations")
{
    auto s = build_scenario(small_config());
    auto grid = TimeGrid::for_config(s.config);
    TrackGenerator gen(s);
    std::vector<ChannelRealization> rs;
    for (std::size_t r = 0; r < 40; ++r)
        rs.push_back(monte_carlo_realization(s, gen, grid, AntennaSelection::all(s), 9, r));

    std::vector<int> lags{0, 4};
    auto acf = acf_empirical(rs, 3, 1, 1, lags);
    CHECK(acf.samples == 40);
    CHECK(acf.grid[1] == Approx(4 * grid.step));
    acf.check();

    // Streaming driver gives the same numbers
    MonteCarloOptions o;
    o.runs = 40;
    o.seed = 9;
    auto stream = acf_monte_carlo(s, 3, 1, lags, grid, o);
    CHECK(std::abs(stream[1].values[0] - acf.values[0]) < 1e-12);
    CHECK(std::abs(stream[1].values[1] - acf.values[1]) < 1e-12);

    auto cc = ccf_empirical(rs, 3, 5, 1, 2, 2, 7);
    CHECK(cc.samples == 40);
    CHECK(cc.std_error > 0.0);

    std::span<const ChannelRealization> one(rs.data(), 1);
    CHECK_THROWS_AS(acf_empirical(one, 3, 1, 1, lags), EstimatorError);
    CHECK_THROWS_AS(ccf_empirical(one, 3, 5, 1, 2, 2, 7), EstimatorError);
    std::vector<int> too_long{64};
    CHECK_THROWS(acf_empirical(rs, 3, 1, 1, too_long));
}
