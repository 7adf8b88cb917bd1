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

#ifndef nsmimo_largescale_H
#define nsmimo_largescale_H

#include "nsmimo/rng.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace nsmimo
{
    // Lognormal shadowing of one cluster along the BS array: xi_p = 10^((sigma * nu_p + mean) / 20)
    struct ShadowParams
    {
        double sigma_db = 0.0;        // Shadow standard deviation [dB]
        double mean_db = 0.0;         // Area mean [dB]
        double decorr_distance = 1.0; // Distance where the Gaussian ACF drops to 1/e [m]

        ShadowParams() = default;
        ShadowParams(double sigma_db, double mean_db, double decorr_distance);

        // Parameters of ln(xi), i.e. multiplied by ln(10) / 20
        double natural_sigma() const;
        double natural_mean() const;
        bool operator==(const ShadowParams &) const = default;
    };

    // Visible / invisible region intensities of the two-state visibility chain [1/m]
    struct VisibilityParams
    {
        double rate_visible = 1.0;   // lambda_v
        double rate_invisible = 1.0; // lambda_i

        VisibilityParams() = default;
        VisibilityParams(double rate_visible, double rate_invisible);

        double total_rate() const { return rate_visible + rate_invisible; }
        double visible_probability() const { return rate_visible / total_rate(); } // p_v = lambda_v / lambda_T
        bool operator==(const VisibilityParams &) const = default;
    };

    // Sampled large-scale processes of one cluster (or the LOS path), one entry per BS element
    struct LargeScaleTrack
    {
        std::vector<double> xi;            // Lognormal amplitude, > 0
        std::vector<std::uint8_t> visible; // Markov state, 0 or 1

        std::size_t size() const { return xi.size(); }
        double power_factor(std::size_t i) const { return visible[i] ? xi[i] * xi[i] : 0.0; } // (xi * Pi)^2
    };

    // Row-stochastic transition matrix, state 0 = invisible, state 1 = visible
    using TransitionMatrix = std::array<std::array<double, 2>, 2>;

    // Gaussian spatial ACF exp(-(lag / D)^2)
    double gaussian_acf(double lag, double decorr_distance);

    // Zero-mean, unit-variance Gaussian vector over M equally spaced positions with Gaussian covariance.
    // The covariance factor is computed once; repeated draws only cost a matrix-vector product.
    class CorrelatedGaussianSampler
    {
    public:
        CorrelatedGaussianSampler(int num_antennas, double spacing, double decorr_distance);

        std::vector<double> sample(Rng &rng) const;
        void sample(Rng &rng, std::span<double> out) const;

        int size() const { return int(factor_.rows()); }
        double jitter() const { return jitter_; } // Diagonal regularization that made the factorization succeed
        const Eigen::MatrixXd &factor() const { return factor_; }

    private:
        Eigen::MatrixXd factor_; // Lower-triangular, covariance = L * L^T
        double jitter_ = 0.0;
    };

    std::vector<double> sample_correlated_gaussian(int num_antennas, double spacing, double decorr_distance,
                                                   Rng &rng);

    std::vector<double> lognormal_track(std::span<const double> nu, const ShadowParams &shadow);

    // E[xi_p xi_p'] for |p - p'| = lag_antennas
    double lognormal_acf(int lag_antennas, double spacing, const ShadowParams &shadow);

    // E[xi^2] and E[xi]
    double lognormal_second_moment(const ShadowParams &shadow);
    double lognormal_mean(const ShadowParams &shadow);

    TransitionMatrix markov_transition(double gap, const VisibilityParams &vis);

    // First state from the stationary law, then one transition per element spacing
    std::vector<std::uint8_t> sample_visibility_track(int num_antennas, double spacing, const VisibilityParams &vis,
                                                      Rng &rng);

    // Closed-form visibility ACF p_v * exp(-lambda_T * spacing * |lag|).
    // Matches E[Pi_p Pi_p'] only at lag 0; see visibility_correlation for the exact second moment.
    double markov_acf(int lag_antennas, double spacing, const VisibilityParams &vis);

    // E[Pi_p Pi_p'] of the stationary chain: p_v * T_vv(|lag| * spacing) = p_v (p_v + p_i exp(-lambda_T x))
    double visibility_correlation(int lag_antennas, double spacing, const VisibilityParams &vis);

    // Draws a full track (xi and Pi are independent)
    LargeScaleTrack sample_track(const CorrelatedGaussianSampler &sampler, const ShadowParams &shadow,
                                 const VisibilityParams &vis, double spacing, Rng &rng);
}

#endif
