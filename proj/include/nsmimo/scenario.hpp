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

#ifndef nsmimo_scenario_H
#define nsmimo_scenario_H

#include "nsmimo/geometry.hpp"
#include "nsmimo/largescale.hpp"
#include "nsmimo/rng.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace nsmimo
{
    enum class PowerModel
    {
        massive_mimo, // Per-cluster shadow factor dropped, power variations come from the large-scale tracks
        winner        // Per-cluster shadow draw with 3 dB standard deviation kept in the cluster power
    };

    enum class SigmaUnits
    {
        db,     // Shadow sigma given in dB
        natural // Shadow sigma given as the standard deviation of ln(xi)
    };

    // Everything needed to build and simulate one scenario. Defaults reproduce the urban macro-cell
    // setup: 2.6 GHz, 128-element BS and 10-element MS half-wavelength ULAs, D_TR = 50 m, 20 clusters.
    struct ScenarioConfig
    {
        int schema_version = 1;

        double carrier_frequency = 2.6e9;                              // [Hz]
        ArraySpec tx_array{128, 0.5 * speed_of_light / 2.6e9, pi / 2}; // BS array
        ArraySpec rx_array{10, 0.5 * speed_of_light / 2.6e9, pi / 4};  // MS array

        double d_tr = 50.0;                    // BS-MS center distance [m]
        double los_aod = pi / 4;               // phi_L^t [rad]
        double los_aoa = wrap_angle(pi / 4 + pi); // phi_L^r [rad]
        Motion motion{10.0, 0.0};

        int num_clusters = 20;     // C
        int rays_per_cluster = 20; // M_c
        double delay_ratio = 2.3;       // r_tau
        double delay_spread = 365e-9;   // sigma_tau [s]
        double cluster_asd = pi / 12;   // Ray angle spread within a cluster [rad]
        double composite_asd = pi / 3;  // Spread of cluster AoDs around the LOS direction [rad]
        double cluster_range_mean = 15.0; // Mean of R_c - R_min [m]
        double cluster_range_min = 20.0;  // [m]
        PowerModel power_model = PowerModel::massive_mimo;
        double winner_shadow_std_db = 3.0; // sigma_nu, only used by PowerModel::winner

        double shadow_sigma = 0.2; // Cluster shadow standard deviation, see shadow_sigma_units
        SigmaUnits shadow_sigma_units = SigmaUnits::natural;
        double shadow_decorr = 0.6;      // D_c [m]
        double los_shadow_sigma = 0.2;   // Same units as shadow_sigma
        double los_area_mean_db = 0.0;
        double markov_rate_strong = 0.01; // lambda_v = lambda_i for clusters at or above the upper median power [1/m]
        double markov_rate_weak = 0.5;    // lambda_v = lambda_i for the remaining clusters [1/m]
        double los_markov_rate = 0.01;    // lambda_v = lambda_i of the LOS path [1/m]
        double area_mean_coupling = 1.0;  // m_c = coupling * P_c [dB]

        int time_samples = 256;
        double time_step = 0.0; // [s], 0 = 1 / (8 f_max)

        std::uint64_t seed = 1;

        double wavelength() const { return wavelength_of(carrier_frequency); }
        double shadow_sigma_db() const;
        double los_shadow_sigma_db() const;

        void validate() const; // Throws ConfigError naming the offending key

        bool operator==(const ScenarioConfig &) const = default;
    };

    struct LosPath
    {
        Placement placement; // (D_TR, phi_L^t, phi_L^r)
        double delay = 0.0;  // Propagation delay D_TR / c [s]
        ShadowParams shadow;
        VisibilityParams visibility;
    };

    struct RaySet
    {
        std::vector<double> aods;   // phi_{m_c}^t [rad]
        std::vector<double> aoas;   // phi_{m_c}^r [rad]
        std::vector<double> phases; // theta_{m_c} in [0, 2 pi)
    };

    struct Cluster
    {
        int index = 1;           // c, 1-based
        Placement placement;     // (R_c, phi_c^t, phi_c^r)
        double delay = 0.0;      // Excess delay tau_c w.r.t. the LOS [s]
        double mean_power = 0.0; // P_c after normalization
        RaySet rays;
        ShadowParams shadow;
        VisibilityParams visibility;
    };

    struct Scenario
    {
        ScenarioConfig config;
        LosPath los;
        std::vector<Cluster> clusters;

        double wavelength() const { return config.wavelength(); }
        int num_taps() const { return 1 + int(clusters.size()); } // Tap 0 is the LOS
        std::vector<double> tap_delays() const;                   // Absolute tap delays [s]
    };

    struct ClusterLargeScale
    {
        ShadowParams shadow;
        VisibilityParams visibility;
    };

    // exp(-tau (r - 1) / (r sigma_tau)) * 10^(-nu / 10)
    double cluster_power_winner(double delay, double r_tau, double sigma_tau, double shadow_draw_db);

    std::vector<double> normalize_powers(std::span<const double> powers);

    // Sorted excess delays, first one zero
    std::vector<double> draw_delays(const ScenarioConfig &config, Rng &rng);

    Placement draw_cluster_geometry(const ScenarioConfig &config, Rng &rng);

    // Wrapped-Gaussian ray offsets around the cluster center, uniform phases
    RaySet draw_rays(double cluster_center_aod, double cluster_center_aoa, int num_rays, double cluster_asd,
                     Rng &rng);

    std::vector<ClusterLargeScale> assign_large_scale_params(std::span<const double> powers,
                                                             const ScenarioConfig &config);

    // Deterministic in config.seed
    Scenario build_scenario(const ScenarioConfig &config);

    // Same clusters with freshly drawn rays and phases (one Monte-Carlo realization of the small scale)
    Scenario redraw_rays(const Scenario &scenario, Rng &rng);
}

#endif
