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

#include "nsmimo/scenario.hpp"
#include "nsmimo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace
{
    double to_db_sigma(double sigma, nsmimo::SigmaUnits units)
    {
        return units == nsmimo::SigmaUnits::db ? sigma : sigma * 20.0 / std::numbers::ln10;
    }

    void require(bool ok, const char *key, const char *message)
    {
        if (!ok)
            throw nsmimo::ConfigError(key, message);
    }
}

double nsmimo::ScenarioConfig::shadow_sigma_db() const
{
    return to_db_sigma(shadow_sigma, shadow_sigma_units);
}

double nsmimo::ScenarioConfig::los_shadow_sigma_db() const
{
    return to_db_sigma(los_shadow_sigma, shadow_sigma_units);
}

void nsmimo::ScenarioConfig::validate() const
{
    require(schema_version == 1, "schema_version", "unsupported schema version (expected 1)");
    require(carrier_frequency > 0.0 && std::isfinite(carrier_frequency), "carrier_frequency", "must be positive");
    require(tx_array.num_elements >= 1, "tx_array.num_elements", "must be at least 1");
    require(rx_array.num_elements >= 1, "rx_array.num_elements", "must be at least 1");
    require(tx_array.spacing > 0.0, "tx_array.spacing", "must be positive");
    require(rx_array.spacing > 0.0, "rx_array.spacing", "must be positive");
    require(d_tr > 0.0, "link.d_tr", "must be positive");
    require(motion.speed >= 0.0, "motion.speed", "cannot be negative");
    require(num_clusters >= 1, "clusters.count", "must be at least 1");
    require(rays_per_cluster >= 1, "clusters.rays", "must be at least 1");
    require(delay_ratio > 1.0, "clusters.delay_ratio", "must exceed 1");
    require(delay_spread > 0.0, "clusters.delay_spread", "must be positive");
    require(cluster_asd >= 0.0, "clusters.cluster_asd", "cannot be negative");
    require(composite_asd >= 0.0, "clusters.composite_asd", "cannot be negative");
    require(cluster_range_mean > 0.0, "clusters.range_mean", "must be positive");
    require(cluster_range_min > 0.0, "clusters.range_min", "must be positive");
    require(winner_shadow_std_db >= 0.0, "clusters.winner_shadow_std_db", "cannot be negative");
    require(shadow_sigma >= 0.0, "large_scale.shadow_sigma", "cannot be negative");
    require(los_shadow_sigma >= 0.0, "large_scale.los_shadow_sigma", "cannot be negative");
    require(shadow_decorr > 0.0, "large_scale.decorr_distance", "must be positive");
    require(markov_rate_strong > 0.0, "large_scale.markov_rate_strong", "must be positive");
    require(markov_rate_weak > 0.0, "large_scale.markov_rate_weak", "must be positive");
    require(los_markov_rate > 0.0, "large_scale.los_markov_rate", "must be positive");
    require(std::isfinite(area_mean_coupling), "large_scale.area_mean_coupling", "must be finite");
    require(time_samples >= 1, "time.samples", "must be at least 1");
    require(time_step >= 0.0, "time.step", "cannot be negative");
}

std::vector<double> nsmimo::Scenario::tap_delays() const
{
    std::vector<double> delays;
    delays.reserve(clusters.size() + 1);
    delays.push_back(los.delay);
    for (const auto &c : clusters)
        delays.push_back(los.delay + c.delay);
    return delays;
}

double nsmimo::cluster_power_winner(double delay, double r_tau, double sigma_tau, double shadow_draw_db)
{
    if (!(r_tau > 1.0))
        throw std::domain_error("Delay ratio r_tau must exceed 1.");
    if (!(sigma_tau > 0.0))
        throw std::domain_error("Delay spread must be positive.");
    return std::exp(-delay * (r_tau - 1.0) / (r_tau * sigma_tau)) * std::pow(10.0, -shadow_draw_db / 10.0);
}

std::vector<double> nsmimo::normalize_powers(std::span<const double> powers)
{
    double total = 0.0;
    for (double p : powers)
    {
        if (!(p >= 0.0) || !std::isfinite(p))
            throw std::domain_error("Powers must be finite and non-negative.");
        total += p;
    }
    if (!(total > 0.0))
        throw std::domain_error("Cannot normalize an all-zero power vector.");

    std::vector<double> out(powers.begin(), powers.end());
    for (double &p : out)
        p /= total;
    return out;
}

std::vector<double> nsmimo::draw_delays(const ScenarioConfig &config, Rng &rng)
{
    std::vector<double> delays(std::size_t(config.num_clusters));
    for (double &tau : delays)
        tau = rng.exponential(config.delay_ratio * config.delay_spread);
    std::sort(delays.begin(), delays.end());
    const double first = delays.front();
    for (double &tau : delays)
        tau -= first;
    return delays;
}

nsmimo::Placement nsmimo::draw_cluster_geometry(const ScenarioConfig &config, Rng &rng)
{
    double range = config.cluster_range_min + rng.exponential(config.cluster_range_mean);

    // Uniform window whose standard deviation equals the composite ASD
    double half_width = std::sqrt(3.0) * config.composite_asd;
    double aod = config.los_aod + rng.uniform(-half_width, half_width);
    double aoa = rng.uniform(-pi, pi);
    return Placement(range, aod, aoa);
}

nsmimo::RaySet nsmimo::draw_rays(double cluster_center_aod, double cluster_center_aoa, int num_rays,
                                 double cluster_asd, Rng &rng)
{
    if (num_rays < 1)
        throw std::domain_error("Need at least one ray per cluster.");
    RaySet rays;
    rays.aods.resize(std::size_t(num_rays));
    rays.aoas.resize(std::size_t(num_rays));
    rays.phases.resize(std::size_t(num_rays));
    for (std::size_t m = 0; m < std::size_t(num_rays); ++m)
    {
        rays.aods[m] = wrap_angle(cluster_center_aod + cluster_asd * rng.normal());
        rays.aoas[m] = wrap_angle(cluster_center_aoa + cluster_asd * rng.normal());
        rays.phases[m] = two_pi * rng.uniform();
    }
    return rays;
}

std::vector<nsmimo::ClusterLargeScale> nsmimo::assign_large_scale_params(std::span<const double> powers,
                                                                         const ScenarioConfig &config)
{
    if (powers.empty())
        return {};

    // Upper median: for odd counts the middle cluster is counted as weak
    std::vector<double> sorted(powers.begin(), powers.end());
    std::sort(sorted.begin(), sorted.end());
    std::size_t n = sorted.size();
    double threshold = sorted[std::min(n - 1, (n + 1) / 2)];

    const double sigma_db = config.shadow_sigma_db();
    std::vector<ClusterLargeScale> out;
    out.reserve(n);
    for (double p : powers)
    {
        double rate = p >= threshold ? config.markov_rate_strong : config.markov_rate_weak;
        out.push_back({ShadowParams(sigma_db, config.area_mean_coupling * p, config.shadow_decorr),
                       VisibilityParams(rate, rate)});
    }
    return out;
}

nsmimo::Scenario nsmimo::build_scenario(const ScenarioConfig &config)
{
    config.validate();
    Rng rng(config.seed);

    Scenario scenario;
    scenario.config = config;
    scenario.los.placement = Placement(config.d_tr, config.los_aod, config.los_aoa);
    scenario.los.delay = config.d_tr / speed_of_light;
    scenario.los.shadow = ShadowParams(config.los_shadow_sigma_db(), config.los_area_mean_db, config.shadow_decorr);
    scenario.los.visibility = VisibilityParams(config.los_markov_rate, config.los_markov_rate);

    const auto delays = draw_delays(config, rng);
    const std::size_t C = delays.size();

    std::vector<double> raw_powers(C);
    for (std::size_t c = 0; c < C; ++c)
    {
        double nu = config.power_model == PowerModel::winner ? rng.normal(0.0, config.winner_shadow_std_db) : 0.0;
        raw_powers[c] = cluster_power_winner(delays[c], config.delay_ratio, config.delay_spread, nu);
    }
    const auto powers = normalize_powers(raw_powers);
    const auto large_scale = assign_large_scale_params(powers, config);

    scenario.clusters.resize(C);
    for (std::size_t c = 0; c < C; ++c)
    {
        Cluster &cl = scenario.clusters[c];
        cl.index = int(c) + 1;
        cl.delay = delays[c];
        cl.mean_power = powers[c];
        cl.placement = draw_cluster_geometry(config, rng);
        cl.shadow = large_scale[c].shadow;
        cl.visibility = large_scale[c].visibility;
    }
    for (auto &cl : scenario.clusters)
        cl.rays = draw_rays(cl.placement.azimuth_tx, cl.placement.azimuth_rx, config.rays_per_cluster,
                            config.cluster_asd, rng);
    return scenario;
}

nsmimo::Scenario nsmimo::redraw_rays(const Scenario &scenario, Rng &rng)
{
    Scenario out = scenario;
    for (auto &cl : out.clusters)
    {
        int num_rays = cl.rays.aods.empty() ? scenario.config.rays_per_cluster : int(cl.rays.aods.size());
        cl.rays = draw_rays(cl.placement.azimuth_tx, cl.placement.azimuth_rx, num_rays, scenario.config.cluster_asd,
                            rng);
    }
    return out;
}
