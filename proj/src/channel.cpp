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
#include "nsmimo/errors.hpp"
#include "nsmimo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace
{
    using cd = std::complex<double>;

    cd cis(double phase) { return {std::cos(phase), std::sin(phase)}; }

    // BS-side phase of a ray leaving at `aod` from element p: planar + parabolic part
    double tx_phase(double aod, double range, const nsmimo::ArraySpec &tx, int p, double kappa, double wavelength)
    {
        return kappa * nsmimo::element_offset(tx, p) * std::cos(aod - tx.tilt) +
               nsmimo::phase_parabolic(aod, range, tx, p, wavelength);
    }

    double rx_phase(double aoa, const nsmimo::ArraySpec &rx, int q, double kappa)
    {
        return kappa * nsmimo::element_offset(rx, q) * std::cos(aoa - rx.tilt);
    }

    void check_selection(const nsmimo::Scenario &scenario, const nsmimo::AntennaSelection &sel)
    {
        if (sel.tx.empty() || sel.rx.empty())
            throw std::invalid_argument("Antenna selection is empty.");
        for (int p : sel.tx)
            if (p < 1 || p > scenario.config.tx_array.num_elements)
                throw std::domain_error("BS antenna index " + std::to_string(p) + " out of range.");
        for (int q : sel.rx)
            if (q < 1 || q > scenario.config.rx_array.num_elements)
                throw std::domain_error("MS antenna index " + std::to_string(q) + " out of range.");
    }

    void check_track(const nsmimo::LargeScaleTrack &track, const nsmimo::Scenario &scenario)
    {
        auto M = std::size_t(scenario.config.tx_array.num_elements);
        if (track.xi.size() != M || track.visible.size() != M)
            throw std::invalid_argument("Large-scale track length does not match the BS array.");
    }
}

nsmimo::TimeGrid::TimeGrid(double start_, double step_, int count_) : start(start_), step(step_), count(count_)
{
    if (!(step > 0.0))
        throw std::invalid_argument("Time step must be positive.");
    if (count < 1)
        throw std::invalid_argument("Time grid needs at least one sample.");
}

nsmimo::TimeGrid nsmimo::TimeGrid::for_config(const ScenarioConfig &config)
{
    double f_max = max_doppler(config.motion, config.wavelength());
    if (config.time_step > 0.0)
        return TimeGrid(0.0, config.time_step, config.time_samples);
    if (f_max > 0.0)
        return TimeGrid(0.0, 1.0 / (8.0 * f_max), config.time_samples);
    return TimeGrid(0.0, 1.0, 1);
}

nsmimo::TrackGenerator::TrackGenerator(const Scenario &scenario)
    : num_antennas_(scenario.config.tx_array.num_elements), spacing_(scenario.config.tx_array.spacing)
{
    auto make_source = [&](const ShadowParams &shadow, const VisibilityParams &vis)
    {
        auto it = std::find(sampler_distances_.begin(), sampler_distances_.end(), shadow.decorr_distance);
        std::size_t idx = std::size_t(it - sampler_distances_.begin());
        if (it == sampler_distances_.end())
        {
            samplers_.emplace_back(num_antennas_, spacing_, shadow.decorr_distance);
            sampler_distances_.push_back(shadow.decorr_distance);
        }
        return Source{shadow, vis, idx};
    };
    los_ = make_source(scenario.los.shadow, scenario.los.visibility);
    for (const auto &c : scenario.clusters)
        clusters_.push_back(make_source(c.shadow, c.visibility));
}

nsmimo::LargeScaleSet nsmimo::TrackGenerator::draw(Rng &rng) const
{
    LargeScaleSet set;
    set.los = sample_track(sampler_for(los_), los_.shadow, los_.visibility, spacing_, rng);
    set.clusters.reserve(clusters_.size());
    for (const auto &src : clusters_)
        set.clusters.push_back(sample_track(sampler_for(src), src.shadow, src.visibility, spacing_, rng));
    return set;
}

nsmimo::LargeScaleSet nsmimo::draw_tracks(const Scenario &scenario, Rng &rng)
{
    return TrackGenerator(scenario).draw(rng);
}

nsmimo::LargeScaleSet nsmimo::unit_tracks(const Scenario &scenario)
{
    auto M = std::size_t(scenario.config.tx_array.num_elements);
    LargeScaleTrack unit{std::vector<double>(M, 1.0), std::vector<std::uint8_t>(M, 1)};
    return {unit, std::vector<LargeScaleTrack>(scenario.clusters.size(), unit)};
}

nsmimo::AntennaSelection nsmimo::AntennaSelection::all(const Scenario &scenario)
{
    AntennaSelection sel;
    for (int p = 1; p <= scenario.config.tx_array.num_elements; ++p)
        sel.tx.push_back(p);
    for (int q = 1; q <= scenario.config.rx_array.num_elements; ++q)
        sel.rx.push_back(q);
    return sel;
}

int nsmimo::ChannelRealization::tx_slot(int p) const
{
    auto it = std::find(tx_indices.begin(), tx_indices.end(), p);
    if (it == tx_indices.end())
        throw std::out_of_range("BS antenna " + std::to_string(p) + " not part of this realization.");
    return int(it - tx_indices.begin());
}

int nsmimo::ChannelRealization::rx_slot(int q) const
{
    auto it = std::find(rx_indices.begin(), rx_indices.end(), q);
    if (it == rx_indices.end())
        throw std::out_of_range("MS antenna " + std::to_string(q) + " not part of this realization.");
    return int(it - rx_indices.begin());
}

std::complex<double> nsmimo::ChannelRealization::composite(int q, int p, int t) const
{
    int qs = rx_slot(q), ps = tx_slot(p);
    cd sum = 0.0;
    for (int c = 0; c < num_taps(); ++c)
        sum += gains(qs, ps, c, t);
    return sum;
}

nsmimo::ComplexTensor<3> nsmimo::synthesize_los(const Scenario &scenario, const LargeScaleTrack &track,
                                                const TimeGrid &grid, const AntennaSelection &selection)
{
    check_selection(scenario, selection);
    check_track(track, scenario);
    const auto &cfg = scenario.config;
    const double lambda = scenario.wavelength();
    const double kappa = wavenumber(lambda);
    const auto &los = scenario.los.placement;
    const std::size_t Q = selection.rx.size(), P = selection.tx.size(), T = std::size_t(grid.count);

    ComplexTensor<3> out({Q, P, T});
    std::vector<cd> rx_term(Q);
    for (std::size_t qi = 0; qi < Q; ++qi)
        rx_term[qi] = cis(rx_phase(los.azimuth_rx, cfg.rx_array, selection.rx[qi], kappa));

    std::vector<cd> doppler_term(T);
    for (std::size_t pi_ = 0; pi_ < P; ++pi_)
    {
        const int p = selection.tx[pi_];
        const double amp = std::sqrt(track.power_factor(std::size_t(p - 1)));
        if (amp == 0.0)
            continue;
        const cd tx_term = amp * cis(tx_phase(los.azimuth_tx, los.range, cfg.tx_array, p, kappa, lambda));
        const double f = doppler_los(los.azimuth_tx, cfg.tx_array, p, los.range, cfg.motion, lambda);
        for (std::size_t t = 0; t < T; ++t)
            doppler_term[t] = cis(two_pi * f * grid.at(int(t)));
        for (std::size_t qi = 0; qi < Q; ++qi)
        {
            const cd a = tx_term * rx_term[qi];
            for (std::size_t t = 0; t < T; ++t)
                out(qi, pi_, t) = a * doppler_term[t];
        }
    }
    return out;
}

nsmimo::ComplexTensor<3> nsmimo::synthesize_cluster(const Scenario &scenario, const Cluster &cluster,
                                                    const LargeScaleTrack &track, const TimeGrid &grid,
                                                    const AntennaSelection &selection)
{
    check_selection(scenario, selection);
    check_track(track, scenario);
    const auto &rays = cluster.rays;
    if (rays.aods.empty() || rays.aods.size() != rays.aoas.size() || rays.aods.size() != rays.phases.size())
        throw std::invalid_argument("Cluster ray vectors are empty or inconsistent.");

    const auto &cfg = scenario.config;
    const double lambda = scenario.wavelength();
    const double kappa = wavenumber(lambda);
    const std::size_t Q = selection.rx.size(), P = selection.tx.size(), T = std::size_t(grid.count);
    const double M_c = double(rays.aods.size());

    std::vector<double> amp(P);
    for (std::size_t pi_ = 0; pi_ < P; ++pi_)
        amp[pi_] = std::sqrt(cluster.mean_power * track.power_factor(std::size_t(selection.tx[pi_] - 1)) / M_c);

    ComplexTensor<3> out({Q, P, T});
    auto data = out.data();
    std::vector<cd> a(P), b(Q), d(T);
    for (std::size_t m = 0; m < rays.aods.size(); ++m)
    {
        const double aod = rays.aods[m], aoa = rays.aoas[m];
        for (std::size_t pi_ = 0; pi_ < P; ++pi_)
            a[pi_] = amp[pi_] * cis(rays.phases[m] +
                                    tx_phase(aod, cluster.placement.range, cfg.tx_array, selection.tx[pi_], kappa, lambda));
        for (std::size_t qi = 0; qi < Q; ++qi)
            b[qi] = cis(rx_phase(aoa, cfg.rx_array, selection.rx[qi], kappa));
        const double f = doppler_nlos(aoa, cfg.motion, lambda);
        for (std::size_t t = 0; t < T; ++t)
            d[t] = cis(two_pi * f * grid.at(int(t)));

        for (std::size_t qi = 0; qi < Q; ++qi)
            for (std::size_t pi_ = 0; pi_ < P; ++pi_)
            {
                if (amp[pi_] == 0.0)
                    continue;
                const cd ab = a[pi_] * b[qi];
                cd *row = &data[(qi * P + pi_) * T];
                for (std::size_t t = 0; t < T; ++t)
                    row[t] += ab * d[t];
            }
    }
    return out;
}

nsmimo::ChannelRealization nsmimo::synthesize(const Scenario &scenario, const LargeScaleSet &tracks,
                                              const TimeGrid &grid, const AntennaSelection &selection,
                                              const SynthesisOptions &options)
{
    check_selection(scenario, selection);
    if (tracks.clusters.size() != scenario.clusters.size())
        throw std::invalid_argument("Need one large-scale track per cluster.");

    const std::size_t Q = selection.rx.size(), P = selection.tx.size();
    const std::size_t C = std::size_t(scenario.num_taps()), T = std::size_t(grid.count);
    const std::size_t bytes = ComplexTensor<4>::count({Q, P, C, T}) * sizeof(cd);
    if (bytes > options.memory_budget)
    {
        std::ostringstream msg;
        msg << "Channel tensor of shape (" << Q << ", " << P << ", " << C << ", " << T << ") needs " << bytes
            << " bytes, budget is " << options.memory_budget << " bytes.";
        throw ResourceError(msg.str());
    }

    ChannelRealization r;
    r.gains = ComplexTensor<4>({Q, P, C, T});
    r.tx_indices = selection.tx;
    r.rx_indices = selection.rx;
    r.delays = scenario.tap_delays();
    r.grid = grid;
    r.tracks = tracks;
    r.tx_array = scenario.config.tx_array;
    r.rx_array = scenario.config.rx_array;
    r.wavelength = scenario.wavelength();
    r.scenario_seed = scenario.config.seed;

    auto scatter = [&](const ComplexTensor<3> &tap_gains, std::size_t c)
    {
        for (std::size_t q = 0; q < Q; ++q)
            for (std::size_t p = 0; p < P; ++p)
                for (std::size_t t = 0; t < T; ++t)
                    r.gains(q, p, c, t) = tap_gains(q, p, t);
    };
    scatter(synthesize_los(scenario, tracks.los, grid, selection), 0);
    for (std::size_t c = 0; c < scenario.clusters.size(); ++c)
        scatter(synthesize_cluster(scenario, scenario.clusters[c], tracks.clusters[c], grid, selection), c + 1);
    return r;
}

nsmimo::ChannelRealization nsmimo::synthesize(const Scenario &scenario, const LargeScaleSet &tracks,
                                              const TimeGrid &grid)
{
    return synthesize(scenario, tracks, grid, AntennaSelection::all(scenario));
}

nsmimo::ChannelRealization nsmimo::synthesize(const Scenario &scenario, const TimeGrid &grid,
                                              std::uint64_t track_seed, const SynthesisOptions &options)
{
    Rng rng(track_seed);
    auto r = synthesize(scenario, draw_tracks(scenario, rng), grid, AntennaSelection::all(scenario), options);
    r.track_seed = track_seed;
    return r;
}

nsmimo::GriddedCir nsmimo::resample_to_delay_grid(const ChannelRealization &realization, double resolution)
{
    if (!(resolution > 0.0))
        throw std::invalid_argument("Delay resolution must be positive.");
    const auto &shape = realization.gains.shape();
    const double first = *std::min_element(realization.delays.begin(), realization.delays.end());

    std::vector<std::size_t> bin(realization.delays.size());
    std::size_t num_bins = 0;
    for (std::size_t c = 0; c < bin.size(); ++c)
    {
        bin[c] = std::size_t(std::llround((realization.delays[c] - first) / resolution));
        num_bins = std::max(num_bins, bin[c] + 1);
    }

    GriddedCir out{ComplexTensor<4>({shape[0], shape[1], num_bins, shape[3]}), resolution, first};
    for (std::size_t q = 0; q < shape[0]; ++q)
        for (std::size_t p = 0; p < shape[1]; ++p)
            for (std::size_t c = 0; c < shape[2]; ++c)
                for (std::size_t t = 0; t < shape[3]; ++t)
                    out.gains(q, p, bin[c], t) += realization.gains(q, p, c, t);
    return out;
}
