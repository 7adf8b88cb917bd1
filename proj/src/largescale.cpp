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

#include "nsmimo/largescale.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>

namespace
{
    constexpr double db_to_neper = std::numbers::ln10 / 20.0;
}

nsmimo::ShadowParams::ShadowParams(double sigma_db_, double mean_db_, double decorr_distance_)
    : sigma_db(sigma_db_), mean_db(mean_db_), decorr_distance(decorr_distance_)
{
    if (!(sigma_db >= 0.0))
        throw std::invalid_argument("Shadow standard deviation cannot be negative.");
    if (!(decorr_distance > 0.0))
        throw std::invalid_argument("Decorrelation distance must be positive.");
}

double nsmimo::ShadowParams::natural_sigma() const { return sigma_db * db_to_neper; }
double nsmimo::ShadowParams::natural_mean() const { return mean_db * db_to_neper; }

nsmimo::VisibilityParams::VisibilityParams(double rate_visible_, double rate_invisible_)
    : rate_visible(rate_visible_), rate_invisible(rate_invisible_)
{
    if (!(rate_visible > 0.0) || !(rate_invisible > 0.0))
        throw std::invalid_argument("Visibility transition rates must be positive.");
}

double nsmimo::gaussian_acf(double lag, double decorr_distance)
{
    if (!(decorr_distance > 0.0))
        throw std::domain_error("Decorrelation distance must be positive.");
    double u = lag / decorr_distance;
    return std::exp(-u * u);
}

nsmimo::CorrelatedGaussianSampler::CorrelatedGaussianSampler(int num_antennas, double spacing,
                                                             double decorr_distance)
{
    if (num_antennas < 1)
        throw std::domain_error("Need at least one antenna.");

    Eigen::MatrixXd cov(num_antennas, num_antennas);
    for (int i = 0; i < num_antennas; ++i)
        for (int j = 0; j < num_antennas; ++j)
            cov(i, j) = gaussian_acf(double(i - j) * spacing, decorr_distance);

    // The Gaussian kernel matrix is numerically singular for small spacing / decorrelation ratios;
    // escalate a diagonal load until the Cholesky factorization succeeds.
    for (double jitter : {0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6})
    {
        Eigen::MatrixXd loaded = cov;
        loaded.diagonal().array() += jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(loaded);
        if (llt.info() == Eigen::Success)
        {
            factor_ = llt.matrixL();
            jitter_ = jitter;
            return;
        }
    }
    throw std::runtime_error("Covariance factorization failed after diagonal loading up to 1e-6.");
}

void nsmimo::CorrelatedGaussianSampler::sample(Rng &rng, std::span<double> out) const
{
    const Eigen::Index n = factor_.rows();
    if (out.size() != std::size_t(n))
        throw std::invalid_argument("Output span has the wrong length.");

    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i)
        z[i] = rng.normal();
    Eigen::Map<Eigen::VectorXd>(out.data(), n).noalias() = factor_.triangularView<Eigen::Lower>() * z;
}

std::vector<double> nsmimo::CorrelatedGaussianSampler::sample(Rng &rng) const
{
    std::vector<double> out(std::size_t(factor_.rows()));
    sample(rng, out);
    return out;
}

std::vector<double> nsmimo::sample_correlated_gaussian(int num_antennas, double spacing, double decorr_distance,
                                                       Rng &rng)
{
    return CorrelatedGaussianSampler(num_antennas, spacing, decorr_distance).sample(rng);
}

std::vector<double> nsmimo::lognormal_track(std::span<const double> nu, const ShadowParams &shadow)
{
    std::vector<double> xi(nu.size());
    for (std::size_t i = 0; i < nu.size(); ++i)
    {
        if (!std::isfinite(nu[i]))
            throw std::domain_error("Gaussian sample is not finite.");
        xi[i] = std::pow(10.0, (shadow.sigma_db * nu[i] + shadow.mean_db) / 20.0);
    }
    return xi;
}

double nsmimo::lognormal_acf(int lag_antennas, double spacing, const ShadowParams &shadow)
{
    double m = shadow.natural_mean();
    double s = shadow.natural_sigma();
    double r = gaussian_acf(std::abs(double(lag_antennas)) * spacing, shadow.decorr_distance);
    return std::exp(2.0 * m + s * s * (1.0 + r));
}

double nsmimo::lognormal_second_moment(const ShadowParams &shadow)
{
    double m = shadow.natural_mean();
    double s = shadow.natural_sigma();
    return std::exp(2.0 * m + 2.0 * s * s);
}

double nsmimo::lognormal_mean(const ShadowParams &shadow)
{
    double m = shadow.natural_mean();
    double s = shadow.natural_sigma();
    return std::exp(m + 0.5 * s * s);
}

nsmimo::TransitionMatrix nsmimo::markov_transition(double gap, const VisibilityParams &vis)
{
    if (!(gap >= 0.0))
        throw std::domain_error("Transition gap cannot be negative.");
    const double lv = vis.rate_visible, li = vis.rate_invisible, lt = vis.total_rate();
    const double e = std::exp(-lt * gap);

    TransitionMatrix T;
    T[0][0] = (li + lv * e) / lt;
    T[0][1] = (lv - lv * e) / lt;
    T[1][0] = (li - li * e) / lt;
    T[1][1] = (lv + li * e) / lt;
    return T;
}

std::vector<std::uint8_t> nsmimo::sample_visibility_track(int num_antennas, double spacing,
                                                          const VisibilityParams &vis, Rng &rng)
{
    if (num_antennas < 1)
        throw std::domain_error("Need at least one antenna.");
    const TransitionMatrix T = markov_transition(spacing, vis);

    auto track = std::vector<std::uint8_t>(std::size_t(num_antennas));
    std::uint8_t state = rng.bernoulli(vis.visible_probability()) ? 1 : 0;
    track[0] = state;
    for (int p = 1; p < num_antennas; ++p)
    {
        state = rng.bernoulli(T[state][1]) ? 1 : 0;
        track[std::size_t(p)] = state;
    }
    return track;
}

double nsmimo::markov_acf(int lag_antennas, double spacing, const VisibilityParams &vis)
{
    return vis.visible_probability() * std::exp(-vis.total_rate() * spacing * std::abs(double(lag_antennas)));
}

double nsmimo::visibility_correlation(int lag_antennas, double spacing, const VisibilityParams &vis)
{
    double gap = spacing * std::abs(double(lag_antennas));
    return vis.visible_probability() * markov_transition(gap, vis)[1][1];
}

nsmimo::LargeScaleTrack nsmimo::sample_track(const CorrelatedGaussianSampler &sampler, const ShadowParams &shadow,
                                             const VisibilityParams &vis, double spacing, Rng &rng)
{
    LargeScaleTrack track;
    track.xi = lognormal_track(sampler.sample(rng), shadow);
    track.visible = sample_visibility_track(sampler.size(), spacing, vis, rng);
    return track;
}
