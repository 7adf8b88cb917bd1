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


#ifndef nsmimo_stats_H
#define nsmimo_stats_H

#include "nsmimo/channel.hpp"
#include "nsmimo/errors.hpp"

#include <algorithm>
#include <complex>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace nsmimo
{
    enum class Estimator
    {
        analytic,
        monte_carlo
    };

    const char *estimator_name(Estimator e);

    // Labeled 1D statistic over a grid (lag, antenna spacing, antenna index, ...)
    struct StatSeries
    {
        std::string name;                         // acf, ccf, power, kfactor, ...
        std::string label;                        // Free-form series tag written to CSV, e.g. sigma_db=4
        std::string axis;                         // Grid label
        std::string unit;                         // Grid unit
        std::vector<double> grid;                 //
        std::vector<std::complex<double>> values; // Same length as grid
        std::vector<double> std_error;            // Monte-Carlo standard error of each value, empty if analytic
        std::vector<std::uint8_t> infinite;       // 1 where the value is +inf (K-factor), empty otherwise
        Estimator estimator = Estimator::analytic;
        std::size_t samples = 0; // Monte-Carlo realizations
        std::uint64_t seed = 0;
        int tap = -1;            // Tap index, -1 for all / not applicable
        int anchor = 0;          // Reference antenna for CCF curves, 0 if not applicable
        bool complex_valued = true;

        std::size_t size() const { return grid.size(); }
        void check() const; // Throws if lengths disagree
    };

    // Compensated sum; reductions are done in a fixed order so results do not depend on thread count
    class KahanSum
    {
    public:
        void add(double x)
        {
            double y = x - c_;
            double t = sum_ + y;
            c_ = (t - sum_) - y;
            sum_ = t;
        }
        void merge(const KahanSum &o)
        {
            add(o.sum_);
            add(-o.c_);
        }
        double value() const { return sum_; }

    private:
        double sum_ = 0.0, c_ = 0.0;
    };

    // Running mean and standard error of a complex quantity
    class ComplexMoments
    {
    public:
        void add(std::complex<double> x);
        void merge(const ComplexMoments &o);
        std::size_t count() const { return n_; }
        std::complex<double> mean() const;
        // sqrt((var(Re) + var(Im)) / n), i.e. the RMS error of the complex mean
        double std_error() const;

    private:
        std::size_t n_ = 0;
        KahanSum re_, im_, re2_, im2_;
    };

    // Deterministic quadrature of E[f(center + sd * N(0,1))]: trapezoid over +-8 sd, 1024 nodes.
    // Ray angles are only used inside sines and cosines, so wrapping does not change the expectation.
    struct AngleQuadrature
    {
        std::vector<double> nodes;
        std::vector<double> weights; // Sum to 1

        AngleQuadrature(double center, double sd, int num_nodes = 1024);
    };

    // ---------------------------------------------------------------- analytic

    // Time ACF E[h(t) h*(t + lag)] of one tap (0 = LOS) at BS element p and MS element q
    std::complex<double> acf_analytic_value(const Scenario &scenario, int tap, int p, int q, double lag);
    StatSeries acf_analytic(const Scenario &scenario, int tap, int p, int q, std::span<const double> lags);
    std::vector<StatSeries> acf_analytic(const Scenario &scenario, int p, int q, std::span<const double> lags);

    // Spatial CCF E[h_qp(t) h*_q'p'(t)] of one tap at absolute time t
    std::complex<double> ccf_analytic(const Scenario &scenario, int tap, int p, int p2, int q, int q2, double t);

    // Partner of anchor p at spacing k: p + k, or p - k when p + k is beyond the array
    int ccf_partner(int anchor, int spacing, int num_elements);

    // CCF vs spacing 0..max_spacing at fixed q = q', partner per ccf_partner
    StatSeries ccf_curve_analytic(const Scenario &scenario, int tap, int anchor, int q, int max_spacing, double t);

    // Per-antenna total power (xi_L Pi_L)^2 + sum_c P_c (xi_c Pi_c)^2
    StatSeries power_track(const Scenario &scenario, const LargeScaleSet &tracks);

    // LOS over NLOS power per antenna, +inf flagged when no cluster is visible
    StatSeries k_factor_track(const Scenario &scenario, const LargeScaleSet &tracks);

    // max - min of 10 log10(P_p) over the antennas with nonzero power [dB]
    double power_dynamic_range_db(const StatSeries &power);

    // ------------------------------------------------------------- Monte-Carlo

    struct MonteCarloOptions
    {
        std::size_t runs = 10000;
        std::uint64_t seed = 1;
        int jobs = 1;
        std::size_t block = 32; // Runs per reduction block
        bool all_visible = false; // Force Pi = 1 (debugging / Fig. 2 option)
    };

    // One Monte-Carlo realization: fresh ray angles and phases around the fixed cluster centres,
    // fresh large-scale tracks. Run r uses Rng::substream(seed, r).
    ChannelRealization monte_carlo_realization(const Scenario &scenario, const TrackGenerator &tracks,
                                               const TimeGrid &grid, const AntennaSelection &selection,
                                               std::uint64_t seed, std::size_t run, bool all_visible = false);

    // Folds every realization into a State (default-constructible, with merge(const State &)).
    // Blocks of runs are processed by `jobs` threads and merged in run order.
    template <typename State, typename Observe>
    State monte_carlo(const Scenario &scenario, const TimeGrid &grid, const AntennaSelection &selection,
                      const MonteCarloOptions &options, const State &initial, Observe observe)
    {
        const TrackGenerator generator(scenario);
        const std::size_t block = std::max<std::size_t>(1, options.block);
        const std::size_t num_blocks = (options.runs + block - 1) / block;
        std::vector<State> partial(num_blocks, initial);

        auto work = [&](std::size_t first_block, std::size_t stride)
        {
            for (std::size_t b = first_block; b < num_blocks; b += stride)
                for (std::size_t r = b * block; r < std::min(options.runs, (b + 1) * block); ++r)
                    observe(partial[b], monte_carlo_realization(scenario, generator, grid, selection, options.seed, r,
                                                                options.all_visible));
        };

        const std::size_t jobs = std::max<std::size_t>(1, std::size_t(std::max(options.jobs, 1)));
        if (jobs == 1)
            work(0, 1);
        else
        {
            std::vector<std::thread> pool;
            std::exception_ptr failure;
            std::mutex failure_lock;
            for (std::size_t j = 0; j < jobs; ++j)
                pool.emplace_back([&, j]
                                  {
                                      try
                                      {
                                          work(j, jobs);
                                      }
                                      catch (...)
                                      {
                                          std::lock_guard lock(failure_lock);
                                          if (!failure)
                                              failure = std::current_exception();
                                      } });
            for (auto &t : pool)
                t.join();
            if (failure)
                std::rethrow_exception(failure);
        }

        State total = initial;
        for (const auto &s : partial)
            total.merge(s);
        return total;
    }

    // ------------------------------------------------------------- empirical

    // Time-averaged h(t) h*(t + lag) of one realization for each lag (in samples, may be negative)
    std::vector<std::complex<double>> acf_sample(const ChannelRealization &r, int p, int q, int tap,
                                                 std::span<const int> lag_samples);

    // Ensemble + time average over a set of realizations; needs at least 2
    StatSeries acf_empirical(std::span<const ChannelRealization> realizations, int p, int q, int tap,
                             std::span<const int> lag_samples);

    // Ensemble average of h_qp(t_k) h*_q'p'(t_k) at time sample t_index; needs at least 2
    struct ComplexEstimate
    {
        std::complex<double> value;
        double std_error = 0.0;
        std::size_t samples = 0;
    };
    ComplexEstimate ccf_empirical(std::span<const ChannelRealization> realizations, int p, int p2, int q, int q2,
                                  int tap, int t_index);

    // Streaming versions: one StatSeries per tap
    std::vector<StatSeries> acf_monte_carlo(const Scenario &scenario, int p, int q, std::span<const int> lag_samples,
                                            const TimeGrid &grid, const MonteCarloOptions &options);

    // CCF curves vs spacing for each anchor, one StatSeries per (anchor, tap) in anchor-major order
    std::vector<StatSeries> ccf_curves_monte_carlo(const Scenario &scenario, std::span<const int> anchors, int q,
                                                   int max_spacing, double t, const MonteCarloOptions &options);

    // Single antenna pair, one estimate per tap
    std::vector<ComplexEstimate> ccf_monte_carlo(const Scenario &scenario, int p, int p2, int q, int q2, double t,
                                                 const MonteCarloOptions &options);

    // |x - y| <= k * se
    bool within_se(std::complex<double> x, std::complex<double> y, double se, double k = 3.0);
}

#endif
