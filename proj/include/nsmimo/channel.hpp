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

#ifndef nsmimo_channel_H
#define nsmimo_channel_H

#include "nsmimo/largescale.hpp"
#include "nsmimo/rng.hpp"
#include "nsmimo/scenario.hpp"
#include "nsmimo/tensor.hpp"

#include <complex>
#include <cstdint>
#include <vector>

namespace nsmimo
{
    struct TimeGrid
    {
        double start = 0.0; // [s]
        double step = 1.0;   // [s]
        int count = 1;

        TimeGrid() = default;
        TimeGrid(double start, double step, int count);

        double at(int k) const { return start + double(k) * step; }

        // 1 / (8 f_max) spacing with config.time_samples samples, or a single sample without motion
        static TimeGrid for_config(const ScenarioConfig &config);
        bool operator==(const TimeGrid &) const = default;
    };

    // Large-scale tracks of the LOS path and every cluster over the whole BS array
    struct LargeScaleSet
    {
        LargeScaleTrack los;
        std::vector<LargeScaleTrack> clusters;
    };

    // Draws LargeScaleSets for one scenario; the covariance factor is shared between draws
    class TrackGenerator
    {
    public:
        explicit TrackGenerator(const Scenario &scenario);
        LargeScaleSet draw(Rng &rng) const;

    private:
        struct Source
        {
            ShadowParams shadow;
            VisibilityParams visibility;
            std::size_t sampler = 0; // Index into samplers_
        };
        const CorrelatedGaussianSampler &sampler_for(const Source &source) const { return samplers_[source.sampler]; }

        int num_antennas_ = 1;
        double spacing_ = 0.0;
        std::vector<CorrelatedGaussianSampler> samplers_; // One per distinct decorrelation distance
        std::vector<double> sampler_distances_;
        Source los_;
        std::vector<Source> clusters_;
    };

    LargeScaleSet draw_tracks(const Scenario &scenario, Rng &rng);
    LargeScaleSet unit_tracks(const Scenario &scenario); // xi = 1, always visible

    // Subset of antennas to synthesize (1-based indices)
    struct AntennaSelection
    {
        std::vector<int> tx;
        std::vector<int> rx;

        static AntennaSelection all(const Scenario &scenario);
    };

    struct SynthesisOptions
    {
        std::size_t memory_budget = std::size_t(4) << 30; // Max bytes of the gain tensor
    };

    struct ChannelRealization
    {
        ComplexTensor<4> gains;      // (q, p, tap, t) over the selected antennas; tap 0 = LOS
        std::vector<int> tx_indices; // BS element of each p slot
        std::vector<int> rx_indices; // MS element of each q slot
        std::vector<double> delays;  // Per tap [s]
        TimeGrid grid;
        LargeScaleSet tracks;
        ArraySpec tx_array;
        ArraySpec rx_array;
        double wavelength = 1.0;
        std::uint64_t scenario_seed = 0;
        std::uint64_t track_seed = 0;

        int num_taps() const { return int(gains.shape()[2]); }
        int tx_slot(int p) const; // Position of BS element p in the selection
        int rx_slot(int q) const;

        // Gain by antenna index (1-based), tap and time sample
        std::complex<double> gain(int q, int p, int tap, int t) const
        {
            return gains(rx_slot(q), tx_slot(p), tap, t);
        }
        std::complex<double> composite(int q, int p, int t) const; // Sum over taps
    };

    // LOS term (q, p, t)
    ComplexTensor<3> synthesize_los(const Scenario &scenario, const LargeScaleTrack &track, const TimeGrid &grid,
                                    const AntennaSelection &selection);

    // One cluster (q, p, t)
    ComplexTensor<3> synthesize_cluster(const Scenario &scenario, const Cluster &cluster, const LargeScaleTrack &track,
                                        const TimeGrid &grid, const AntennaSelection &selection);

    ChannelRealization synthesize(const Scenario &scenario, const LargeScaleSet &tracks, const TimeGrid &grid,
                                  const AntennaSelection &selection, const SynthesisOptions &options = {});
    ChannelRealization synthesize(const Scenario &scenario, const LargeScaleSet &tracks, const TimeGrid &grid);

    // Tracks drawn from Rng(track_seed)
    ChannelRealization synthesize(const Scenario &scenario, const TimeGrid &grid, std::uint64_t track_seed,
                                  const SynthesisOptions &options = {});

    // Taps placed on a uniform delay grid (nearest bin, coherent sum); bin 0 is the LOS delay
    struct GriddedCir
    {
        ComplexTensor<4> gains; // (q, p, bin, t)
        double resolution = 0.0;
        double first_delay = 0.0;
    };
    GriddedCir resample_to_delay_grid(const ChannelRealization &realization, double resolution);
}

#endif
