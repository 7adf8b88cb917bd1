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
#include "nsmimo/geometry.hpp"
#include "nsmimo/largescale.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace nsmimo;
using doctest::Approx;

namespace
{
    const double spacing = speed_of_light / 2.6e9 / 2;

    double max_abs_diff(const TransitionMatrix &a, const TransitionMatrix &b)
    {
        double m = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                m = std::max(m, std::abs(a[i][j] - b[i][j]));
        return m;
    }

    TransitionMatrix multiply(const TransitionMatrix &a, const TransitionMatrix &b)
    {
        TransitionMatrix c{};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        return c;
    }
}

TEST_CASE("Gaussian ACF")
{
    CHECK(gaussian_acf(0.0, 0.6) == 1.0);
    CHECK(gaussian_acf(0.6, 0.6) == Approx(std::exp(-1.0)));
    CHECK(gaussian_acf(-0.3, 0.6) == gaussian_acf(0.3, 0.6));
    CHECK_THROWS(gaussian_acf(0.1, 0.0));
}

TEST_CASE("lognormal transform and ACF")
{
    ShadowParams s8(8.0, 0.0, 0.6);
    std::vector<double> nu{0.0, 1.0, -1.0};
    auto xi = lognormal_track(nu, s8);
    CHECK(xi[0] == 1.0);
    CHECK(xi[1] == Approx(2.51188643150958).epsilon(1e-12));
    CHECK(xi[2] == Approx(0.3981071705534972).epsilon(1e-12));
    CHECK(xi[1] * xi[2] == Approx(1.0));

    CHECK(s8.natural_sigma() == Approx(0.9210340371976183).epsilon(1e-14));
    CHECK(lognormal_acf(0, spacing, s8) == Approx(lognormal_second_moment(s8)));
    CHECK(lognormal_acf(100000, spacing, s8) == Approx(std::pow(lognormal_mean(s8), 2)));

    // lag * spacing = D_c
    ShadowParams unit_lag(8.0, 0.0, 10 * spacing);
    CHECK(lognormal_acf(10, spacing, unit_lag) == Approx(3.191136707363793).epsilon(1e-12));
    CHECK(lognormal_acf(-10, spacing, unit_lag) == lognormal_acf(10, spacing, unit_lag));
}

TEST_CASE("correlated Gaussian sampler")
{
    Rng rng(11);
    auto one = sample_correlated_gaussian(1, spacing, 0.6, rng);
    CHECK(one.size() == 1);

    CorrelatedGaussianSampler sampler(128, spacing, 0.6);
    CHECK(sampler.size() == 128);
    CHECK(sampler.jitter() <= 1e-6);

    // Factor reproduces the covariance up to the jitter
    Eigen::MatrixXd cov = sampler.factor() * sampler.factor().transpose();
    for (int i = 0; i < 128; i += 7)
        for (int j = 0; j < 128; j += 5)
            CHECK(std::abs(cov(i, j) - gaussian_acf((i - j) * spacing, 0.6)) < 2e-6);

    const int n = 20000;
    const int p = 40;
    std::vector<double> sum(4, 0.0);
    double mean = 0.0;
    for (int k = 0; k < n; ++k)
    {
        auto nu = sampler.sample(rng);
        mean += nu[p];
        sum[0] += nu[p] * nu[p];
        sum[1] += nu[p] * nu[p + 5];
        sum[2] += nu[p] * nu[p + 10];
        sum[3] += nu[p] * nu[p + 20];
    }
    CHECK(std::abs(mean / n) < 0.03);
    CHECK(sum[0] / n == Approx(1.0).epsilon(0.03));
    CHECK(std::abs(sum[1] / n - gaussian_acf(5 * spacing, 0.6)) < 0.03);
    CHECK(std::abs(sum[2] / n - gaussian_acf(10 * spacing, 0.6)) < 0.03);
    CHECK(std::abs(sum[3] / n - gaussian_acf(20 * spacing, 0.6)) < 0.03);
}

TEST_CASE("Markov transition matrix")
{
    VisibilityParams half(0.5, 0.5);
    auto T0 = markov_transition(0.0, half);
    CHECK(T0[0][0] == 1.0);
    CHECK(T0[0][1] == 0.0);
    CHECK(T0[1][0] == 0.0);
    CHECK(T0[1][1] == 1.0);

    auto T1 = markov_transition(1.0, half);
    CHECK(T1[0][0] == Approx(0.6839397205857212).epsilon(1e-14));
    CHECK(T1[0][1] == Approx(0.3160602794142788).epsilon(1e-14));
    CHECK(T1[1][1] == Approx(0.6839397205857212).epsilon(1e-14));

    VisibilityParams skew(0.01, 0.5);
    auto Tinf = markov_transition(1e6, skew);
    CHECK(Tinf[0][1] == Approx(0.01 / 0.51));
    CHECK(Tinf[1][1] == Approx(0.01 / 0.51));

    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> gap(0.0, 5.0);
    for (int k = 0; k < 200; ++k)
    {
        double x1 = gap(gen), x2 = gap(gen);
        auto lhs = multiply(markov_transition(x1, skew), markov_transition(x2, skew));
        CHECK(max_abs_diff(lhs, markov_transition(x1 + x2, skew)) < 1e-12);
        auto T = markov_transition(x1, skew);
        for (int i = 0; i < 2; ++i)
        {
            CHECK(T[i][0] + T[i][1] == Approx(1.0).epsilon(1e-15));
            CHECK(T[i][0] >= 0.0);
            CHECK(T[i][1] >= 0.0);
        }
    }
    CHECK_THROWS(markov_transition(-1.0, skew));
}

TEST_CASE("visibility ACF forms")
{
    VisibilityParams half(0.5, 0.5);
    CHECK(markov_acf(10, 0.0577, half) == Approx(0.28079029186459065).epsilon(1e-12));
    CHECK(markov_acf(0, 0.0577, half) == 0.5);
    CHECK(markov_acf(-10, 0.0577, half) == markov_acf(10, 0.0577, half));
    CHECK(visibility_correlation(0, 0.0577, half) == 0.5);
    // p_v (p_v + p_i e^{-lambda_T x}) -> p_v^2
    CHECK(visibility_correlation(100000, 0.0577, half) == Approx(0.25));
    CHECK(visibility_correlation(10, 0.0577, half) == Approx(0.5 * (0.5 + 0.5 * std::exp(-0.577))).epsilon(1e-12));
}

TEST_CASE("visibility tracks")
{
    Rng rng(5);
    VisibilityParams sticky(0.5, 1e-12);
    int ones = 0;
    for (int k = 0; k < 200; ++k)
        for (auto v : sample_visibility_track(128, spacing, sticky, rng))
            ones += v;
    CHECK(ones == 200 * 128);

    VisibilityParams weak(0.01, 0.5);
    const int n = 20000;
    double left = 0, right = 0;
    for (int k = 0; k < n; ++k)
    {
        auto track = sample_visibility_track(128, spacing, weak, rng);
        left += track[0];
        right += track[127];
    }
    double pv = weak.visible_probability();
    double se = std::sqrt(pv * (1 - pv) / n);
    CHECK(std::abs(left / n - pv) < 4 * se);
    CHECK(std::abs(right / n - pv) < 4 * se);
}

TEST_CASE("full track draws")
{
    Rng rng(9);
    CorrelatedGaussianSampler sampler(16, spacing, 0.6);
    auto track = sample_track(sampler, ShadowParams(3.0, 0.0, 0.6), VisibilityParams(0.5, 0.5), spacing, rng);
    CHECK(track.size() == 16);
    for (std::size_t i = 0; i < 16; ++i)
    {
        CHECK(track.xi[i] > 0.0);
        CHECK(track.visible[i] <= 1);
        CHECK(track.power_factor(i) == (track.visible[i] ? track.xi[i] * track.xi[i] : 0.0));
    }
}
