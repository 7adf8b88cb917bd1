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


#include "nsmimo/stats.hpp"
#include "nsmimo/geometry.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace
{
    using cd = std::complex<double>;
    using namespace nsmimo;

    cd cis(double phase) { return {std::cos(phase), std::sin(phase)}; }

    void check_tap(const Scenario &s, int tap)
    {
        if (tap < 0 || tap >= s.num_taps())
            throw std::out_of_range("Tap " + std::to_string(tap) + " outside 0.." + std::to_string(s.num_taps() - 1) +
                                    ".");
    }

    // Deterministic phase of the LOS path at element pair (p, q), without Doppler
    double los_phase(const Scenario &s, int p, int q)
    {
        const auto &cfg = s.config;
        const double lambda = s.wavelength(), kappa = wavenumber(lambda);
        const auto &pl = s.los.placement;
        return kappa * element_offset(cfg.tx_array, p) * std::cos(pl.azimuth_tx - cfg.tx_array.tilt) +
               phase_parabolic(pl.azimuth_tx, pl.range, cfg.tx_array, p, lambda) +
               kappa * element_offset(cfg.rx_array, q) * std::cos(pl.azimuth_rx - cfg.rx_array.tilt);
    }

    double los_doppler(const Scenario &s, int p)
    {
        const auto &cfg = s.config;
        return doppler_los(s.los.placement.azimuth_tx, cfg.tx_array, p, s.los.placement.range, cfg.motion,
                           s.wavelength());
    }

    void require_samples(std::size_t n)
    {
        if (n < 2)
            throw EstimatorError("At least 2 realizations are needed, got " + std::to_string(n) + ".");
    }

    std::size_t slot_of(const std::vector<int> &indices, int value)
    {
        auto it = std::find(indices.begin(), indices.end(), value);
        if (it == indices.end())
            throw std::out_of_range("Antenna " + std::to_string(value) + " not in the realization.");
        return std::size_t(it - indices.begin());
    }
}

const char *nsmimo::estimator_name(Estimator e)
{
    return e == Estimator::analytic ? "analytic" : "monte-carlo";
}

void nsmimo::StatSeries::check() const
{
    if (values.size() != grid.size())
        throw std::logic_error("StatSeries '" + name + "': values and grid differ in length.");
    if (!std_error.empty() && std_error.size() != grid.size())
        throw std::logic_error("StatSeries '" + name + "': std_error and grid differ in length.");
    if (!infinite.empty() && infinite.size() != grid.size())
        throw std::logic_error("StatSeries '" + name + "': infinity flags and grid differ in length.");
    if (estimator == Estimator::monte_carlo && samples == 0)
        throw std::logic_error("StatSeries '" + name + "': Monte-Carlo series without a sample count.");
}

void nsmimo::ComplexMoments::add(std::complex<double> x)
{
    ++n_;
    re_.add(x.real());
    im_.add(x.imag());
    re2_.add(x.real() * x.real());
    im2_.add(x.imag() * x.imag());
}

void nsmimo::ComplexMoments::merge(const ComplexMoments &o)
{
    n_ += o.n_;
    re_.merge(o.re_);
    im_.merge(o.im_);
    re2_.merge(o.re2_);
    im2_.merge(o.im2_);
}

std::complex<double> nsmimo::ComplexMoments::mean() const
{
    if (n_ == 0)
        return 0.0;
    return {re_.value() / double(n_), im_.value() / double(n_)};
}

double nsmimo::ComplexMoments::std_error() const
{
    if (n_ < 2)
        return std::numeric_limits<double>::infinity();
    const double n = double(n_);
    auto m = mean();
    double var_re = (re2_.value() - n * m.real() * m.real()) / (n - 1.0);
    double var_im = (im2_.value() - n * m.imag() * m.imag()) / (n - 1.0);
    return std::sqrt(std::max(var_re + var_im, 0.0) / n);
}

nsmimo::AngleQuadrature::AngleQuadrature(double center, double sd, int num_nodes)
{
    if (!(sd >= 0.0))
        throw std::domain_error("Angular spread cannot be negative.");
    if (sd == 0.0)
    {
        nodes = {center};
        weights = {1.0};
        return;
    }
    if (num_nodes < 3)
        throw std::domain_error("Quadrature needs at least 3 nodes.");

    const double half = 8.0;
    const double h = 2.0 * half / double(num_nodes - 1);
    nodes.resize(std::size_t(num_nodes));
    weights.resize(std::size_t(num_nodes));
    double total = 0.0;
    for (int i = 0; i < num_nodes; ++i)
    {
        double x = -half + h * double(i);
        double w = std::exp(-0.5 * x * x) * ((i == 0 || i == num_nodes - 1) ? 0.5 : 1.0);
        nodes[std::size_t(i)] = center + sd * x;
        weights[std::size_t(i)] = w;
        total += w;
    }
    for (double &w : weights)
        w /= total;
}

std::complex<double> nsmimo::acf_analytic_value(const Scenario &scenario, int tap, int p, int q, double lag)
{
    check_tap(scenario, tap);
    element_offset(scenario.config.tx_array, p);
    element_offset(scenario.config.rx_array, q);

    if (tap == 0)
    {
        const auto &los = scenario.los;
        return lognormal_second_moment(los.shadow) * los.visibility.visible_probability() *
               cis(-two_pi * los_doppler(scenario, p) * lag);
    }

    const Cluster &c = scenario.clusters[std::size_t(tap - 1)];
    AngleQuadrature aoa(c.placement.azimuth_rx, scenario.config.cluster_asd);
    cd ray = 0.0;
    for (std::size_t i = 0; i < aoa.nodes.size(); ++i)
        ray += aoa.weights[i] * cis(-two_pi * doppler_nlos(aoa.nodes[i], scenario.config.motion, scenario.wavelength()) * lag);
    return lognormal_second_moment(c.shadow) * c.visibility.visible_probability() * c.mean_power * ray;
}

nsmimo::StatSeries nsmimo::acf_analytic(const Scenario &scenario, int tap, int p, int q, std::span<const double> lags)
{
    StatSeries s;
    s.name = "acf";
    s.axis = "lag";
    s.unit = "s";
    s.tap = tap;
    s.grid.assign(lags.begin(), lags.end());
    for (double lag : lags)
        s.values.push_back(acf_analytic_value(scenario, tap, p, q, lag));
    return s;
}

std::vector<nsmimo::StatSeries> nsmimo::acf_analytic(const Scenario &scenario, int p, int q,
                                                     std::span<const double> lags)
{
    std::vector<StatSeries> out;
    for (int tap = 0; tap < scenario.num_taps(); ++tap)
        out.push_back(acf_analytic(scenario, tap, p, q, lags));
    return out;
}

std::complex<double> nsmimo::ccf_analytic(const Scenario &scenario, int tap, int p, int p2, int q, int q2, double t)
{
    check_tap(scenario, tap);
    const auto &cfg = scenario.config;
    const int lag = std::abs(p - p2);
    const double spacing = cfg.tx_array.spacing;

    if (tap == 0)
    {
        const auto &los = scenario.los;
        double amp = lognormal_acf(lag, spacing, los.shadow) * visibility_correlation(lag, spacing, los.visibility);
        double phase = los_phase(scenario, p, q) - los_phase(scenario, p2, q2) +
                       two_pi * t * (los_doppler(scenario, p) - los_doppler(scenario, p2));
        return amp * cis(phase);
    }

    const Cluster &c = scenario.clusters[std::size_t(tap - 1)];
    const double kappa = wavenumber(scenario.wavelength());
    const double dp = element_offset(cfg.tx_array, p), dp2 = element_offset(cfg.tx_array, p2);
    const double dq = element_offset(cfg.rx_array, q), dq2 = element_offset(cfg.rx_array, q2);

    // Rays share the cluster's Doppler shift, so the time term cancels
    AngleQuadrature aod(c.placement.azimuth_tx, cfg.cluster_asd);
    cd tx = 0.0;
    for (std::size_t i = 0; i < aod.nodes.size(); ++i)
    {
        double u = aod.nodes[i] - cfg.tx_array.tilt;
        double s = std::sin(u);
        tx += aod.weights[i] *
              cis(kappa * ((dp - dp2) * std::cos(u) - (dp * dp - dp2 * dp2) * s * s / (2.0 * c.placement.range)));
    }
    cd rx = 1.0;
    if (dq != dq2)
    {
        AngleQuadrature aoa(c.placement.azimuth_rx, cfg.cluster_asd);
        rx = 0.0;
        for (std::size_t i = 0; i < aoa.nodes.size(); ++i)
            rx += aoa.weights[i] * cis(kappa * (dq - dq2) * std::cos(aoa.nodes[i] - cfg.rx_array.tilt));
    }
    return c.mean_power * lognormal_acf(lag, spacing, c.shadow) * visibility_correlation(lag, spacing, c.visibility) *
           tx * rx;
}

int nsmimo::ccf_partner(int anchor, int spacing, int num_elements)
{
    if (anchor < 1 || anchor > num_elements)
        throw std::domain_error("Anchor antenna " + std::to_string(anchor) + " out of range.");
    if (spacing < 0 || spacing >= num_elements)
        throw std::domain_error("Spacing " + std::to_string(spacing) + " does not fit in the array.");
    int partner = anchor + spacing;
    if (partner > num_elements)
        partner = anchor - spacing;
    if (partner < 1)
        throw std::domain_error("Spacing " + std::to_string(spacing) + " does not fit around antenna " +
                                std::to_string(anchor) + ".");
    return partner;
}

nsmimo::StatSeries nsmimo::ccf_curve_analytic(const Scenario &scenario, int tap, int anchor, int q, int max_spacing,
                                              double t)
{
    StatSeries s;
    s.name = "ccf";
    s.axis = "spacing";
    s.unit = "antennas";
    s.tap = tap;
    s.anchor = anchor;
    const int M = scenario.config.tx_array.num_elements;
    for (int k = 0; k <= max_spacing; ++k)
    {
        s.grid.push_back(double(k));
        s.values.push_back(ccf_analytic(scenario, tap, anchor, ccf_partner(anchor, k, M), q, q, t));
    }
    return s;
}

namespace
{
    StatSeries antenna_series(const char *name, std::size_t M)
    {
        StatSeries s;
        s.name = name;
        s.axis = "antenna";
        s.unit = "index";
        s.complex_valued = false;
        for (std::size_t p = 1; p <= M; ++p)
            s.grid.push_back(double(p));
        return s;
    }

    void check_tracks(const Scenario &scenario, const LargeScaleSet &tracks)
    {
        if (tracks.clusters.size() != scenario.clusters.size())
            throw std::invalid_argument("Need one large-scale track per cluster.");
        const std::size_t M = std::size_t(scenario.config.tx_array.num_elements);
        if (tracks.los.size() != M)
            throw std::invalid_argument("LOS track length does not match the BS array.");
        for (const auto &t : tracks.clusters)
            if (t.size() != M)
                throw std::invalid_argument("Cluster track length does not match the BS array.");
    }

    double nlos_power(const Scenario &scenario, const LargeScaleSet &tracks, std::size_t i)
    {
        double sum = 0.0;
        for (std::size_t c = 0; c < tracks.clusters.size(); ++c)
            sum += scenario.clusters[c].mean_power * tracks.clusters[c].power_factor(i);
        return sum;
    }
}

nsmimo::StatSeries nsmimo::power_track(const Scenario &scenario, const LargeScaleSet &tracks)
{
    check_tracks(scenario, tracks);
    const std::size_t M = tracks.los.size();
    StatSeries s = antenna_series("power", M);
    for (std::size_t i = 0; i < M; ++i)
        s.values.push_back(tracks.los.power_factor(i) + nlos_power(scenario, tracks, i));
    return s;
}

nsmimo::StatSeries nsmimo::k_factor_track(const Scenario &scenario, const LargeScaleSet &tracks)
{
    check_tracks(scenario, tracks);
    const std::size_t M = tracks.los.size();
    StatSeries s = antenna_series("kfactor", M);
    s.infinite.assign(M, 0);
    for (std::size_t i = 0; i < M; ++i)
    {
        double nlos = nlos_power(scenario, tracks, i);
        double los = tracks.los.power_factor(i);
        if (nlos == 0.0)
        {
            s.infinite[i] = 1;
            s.values.push_back(std::numeric_limits<double>::infinity());
        }
        else
            s.values.push_back(los / nlos);
    }
    return s;
}

double nsmimo::power_dynamic_range_db(const StatSeries &power)
{
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto &v : power.values)
        if (v.real() > 0.0)
        {
            double db = 10.0 * std::log10(v.real());
            lo = std::min(lo, db);
            hi = std::max(hi, db);
        }
    return hi >= lo ? hi - lo : 0.0;
}

nsmimo::ChannelRealization nsmimo::monte_carlo_realization(const Scenario &scenario, const TrackGenerator &tracks,
                                                           const TimeGrid &grid, const AntennaSelection &selection,
                                                           std::uint64_t seed, std::size_t run, bool all_visible)
{
    Rng rng = Rng::substream(seed, run);
    Scenario drawn = redraw_rays(scenario, rng);
    LargeScaleSet set = tracks.draw(rng);
    if (all_visible)
    {
        std::fill(set.los.visible.begin(), set.los.visible.end(), 1);
        for (auto &t : set.clusters)
            std::fill(t.visible.begin(), t.visible.end(), 1);
    }
    auto r = synthesize(drawn, set, grid, selection);
    r.track_seed = seed;
    return r;
}

std::vector<std::complex<double>> nsmimo::acf_sample(const ChannelRealization &r, int p, int q, int tap,
                                                     std::span<const int> lag_samples)
{
    const std::size_t ps = std::size_t(r.tx_slot(p)), qs = std::size_t(r.rx_slot(q));
    const int T = r.grid.count;
    if (tap < 0 || tap >= r.num_taps())
        throw std::out_of_range("Tap index out of range.");

    std::vector<cd> out;
    out.reserve(lag_samples.size());
    for (int lag : lag_samples)
    {
        if (std::abs(lag) >= T)
            throw std::out_of_range("Lag of " + std::to_string(lag) + " samples exceeds the time grid.");
        cd sum = 0.0;
        int first = std::max(0, -lag), last = std::min(T, T - lag);
        for (int t = first; t < last; ++t)
            sum += r.gains(qs, ps, std::size_t(tap), std::size_t(t)) *
                   std::conj(r.gains(qs, ps, std::size_t(tap), std::size_t(t + lag)));
        out.push_back(sum / double(last - first));
    }
    return out;
}

namespace
{
    StatSeries acf_series(const std::vector<ComplexMoments> &m, std::span<const int> lags, double step, int tap)
    {
        StatSeries s;
        s.name = "acf";
        s.axis = "lag";
        s.unit = "s";
        s.tap = tap;
        s.estimator = Estimator::monte_carlo;
        for (std::size_t k = 0; k < lags.size(); ++k)
        {
            s.grid.push_back(double(lags[k]) * step);
            s.values.push_back(m[k].mean());
            s.std_error.push_back(m[k].std_error());
        }
        s.samples = m.empty() ? 0 : m.front().count();
        return s;
    }
}

nsmimo::StatSeries nsmimo::acf_empirical(std::span<const ChannelRealization> realizations, int p, int q, int tap,
                                         std::span<const int> lag_samples)
{
    require_samples(realizations.size());
    std::vector<ComplexMoments> m(lag_samples.size());
    for (const auto &r : realizations)
    {
        if (!(r.grid == realizations.front().grid))
            throw EstimatorError("Realizations use different time grids.");
        auto v = acf_sample(r, p, q, tap, lag_samples);
        for (std::size_t k = 0; k < v.size(); ++k)
            m[k].add(v[k]);
    }
    return acf_series(m, lag_samples, realizations.front().grid.step, tap);
}

nsmimo::ComplexEstimate nsmimo::ccf_empirical(std::span<const ChannelRealization> realizations, int p, int p2, int q,
                                              int q2, int tap, int t_index)
{
    require_samples(realizations.size());
    ComplexMoments m;
    for (const auto &r : realizations)
    {
        if (t_index < 0 || t_index >= r.grid.count)
            throw std::out_of_range("Time index outside the grid.");
        m.add(r.gain(q, p, tap, t_index) * std::conj(r.gain(q2, p2, tap, t_index)));
    }
    return {m.mean(), m.std_error(), m.count()};
}

namespace
{
    struct MomentTable
    {
        std::vector<ComplexMoments> cells;
        void merge(const MomentTable &o)
        {
            for (std::size_t i = 0; i < cells.size(); ++i)
                cells[i].merge(o.cells[i]);
        }
    };

    void require_runs(const MonteCarloOptions &o) { require_samples(o.runs); }
}

std::vector<nsmimo::StatSeries> nsmimo::acf_monte_carlo(const Scenario &scenario, int p, int q,
                                                        std::span<const int> lag_samples, const TimeGrid &grid,
                                                        const MonteCarloOptions &options)
{
    require_runs(options);
    const std::size_t taps = std::size_t(scenario.num_taps()), L = lag_samples.size();
    for (int lag : lag_samples)
        if (std::abs(lag) >= grid.count)
            throw std::out_of_range("Lag of " + std::to_string(lag) + " samples exceeds the time grid.");

    MomentTable init{std::vector<ComplexMoments>(taps * L)};
    auto table = monte_carlo(scenario, grid, AntennaSelection{{p}, {q}}, options, init,
                             [&](MomentTable &st, const ChannelRealization &r)
                             {
                                 for (std::size_t c = 0; c < taps; ++c)
                                 {
                                     auto v = acf_sample(r, p, q, int(c), lag_samples);
                                     for (std::size_t k = 0; k < L; ++k)
                                         st.cells[c * L + k].add(v[k]);
                                 }
                             });

    std::vector<StatSeries> out;
    for (std::size_t c = 0; c < taps; ++c)
    {
        std::vector<ComplexMoments> m(table.cells.begin() + std::ptrdiff_t(c * L),
                                      table.cells.begin() + std::ptrdiff_t((c + 1) * L));
        auto s = acf_series(m, lag_samples, grid.step, int(c));
        s.seed = options.seed;
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<nsmimo::StatSeries> nsmimo::ccf_curves_monte_carlo(const Scenario &scenario, std::span<const int> anchors,
                                                               int q, int max_spacing, double t,
                                                               const MonteCarloOptions &options)
{
    require_runs(options);
    const int M = scenario.config.tx_array.num_elements;
    const std::size_t taps = std::size_t(scenario.num_taps()), K = std::size_t(max_spacing + 1);

    // Antennas touched by any curve, and the slot of each (anchor, spacing) pair
    AntennaSelection sel{{}, {q}};
    std::vector<int> partners;
    for (int a : anchors)
        for (int k = 0; k <= max_spacing; ++k)
        {
            int b = ccf_partner(a, k, M);
            partners.push_back(b);
            for (int x : {a, b})
                if (std::find(sel.tx.begin(), sel.tx.end(), x) == sel.tx.end())
                    sel.tx.push_back(x);
        }
    std::sort(sel.tx.begin(), sel.tx.end());
    std::vector<std::size_t> anchor_slot, partner_slot;
    for (std::size_t ai = 0; ai < anchors.size(); ++ai)
        for (std::size_t k = 0; k < K; ++k)
        {
            anchor_slot.push_back(slot_of(sel.tx, anchors[ai]));
            partner_slot.push_back(slot_of(sel.tx, partners[ai * K + k]));
        }

    MomentTable init{std::vector<ComplexMoments>(anchors.size() * taps * K)};
    auto table = monte_carlo(scenario, TimeGrid(t, 1.0, 1), sel, options, init,
                             [&](MomentTable &st, const ChannelRealization &r)
                             {
                                 for (std::size_t ai = 0; ai < anchors.size(); ++ai)
                                     for (std::size_t c = 0; c < taps; ++c)
                                         for (std::size_t k = 0; k < K; ++k)
                                         {
                                             std::size_t idx = ai * K + k;
                                             st.cells[(ai * taps + c) * K + k].add(
                                                 r.gains(0, anchor_slot[idx], c, 0) *
                                                 std::conj(r.gains(0, partner_slot[idx], c, 0)));
                                         }
                             });

    std::vector<StatSeries> out;
    for (std::size_t ai = 0; ai < anchors.size(); ++ai)
        for (std::size_t c = 0; c < taps; ++c)
        {
            StatSeries s;
            s.name = "ccf";
            s.axis = "spacing";
            s.unit = "antennas";
            s.tap = int(c);
            s.anchor = anchors[ai];
            s.estimator = Estimator::monte_carlo;
            s.seed = options.seed;
            for (std::size_t k = 0; k < K; ++k)
            {
                const auto &m = table.cells[(ai * taps + c) * K + k];
                s.grid.push_back(double(k));
                s.values.push_back(m.mean());
                s.std_error.push_back(m.std_error());
                s.samples = m.count();
            }
            out.push_back(std::move(s));
        }
    return out;
}

std::vector<nsmimo::ComplexEstimate> nsmimo::ccf_monte_carlo(const Scenario &scenario, int p, int p2, int q, int q2,
                                                             double t, const MonteCarloOptions &options)
{
    require_runs(options);
    AntennaSelection sel{{p}, {q}};
    if (p2 != p)
        sel.tx.push_back(p2);
    if (q2 != q)
        sel.rx.push_back(q2);
    const std::size_t taps = std::size_t(scenario.num_taps());
    const std::size_t ps = 0, p2s = slot_of(sel.tx, p2), qs = 0, q2s = slot_of(sel.rx, q2);

    MomentTable init{std::vector<ComplexMoments>(taps)};
    auto table = monte_carlo(scenario, TimeGrid(t, 1.0, 1), sel, options, init,
                             [&](MomentTable &st, const ChannelRealization &r)
                             {
                                 for (std::size_t c = 0; c < taps; ++c)
                                     st.cells[c].add(r.gains(qs, ps, c, 0) * std::conj(r.gains(q2s, p2s, c, 0)));
                             });
    std::vector<ComplexEstimate> out;
    for (const auto &m : table.cells)
        out.push_back({m.mean(), m.std_error(), m.count()});
    return out;
}

bool nsmimo::within_se(std::complex<double> x, std::complex<double> y, double se, double k)
{
    return std::abs(x - y) <= k * se;
}
